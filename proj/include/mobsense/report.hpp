#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobsense/battery.hpp"
#include "mobsense/completeness.hpp"
#include "mobsense/mobility.hpp"
#include "mobsense/model.hpp"
#include "mobsense/social.hpp"
#include "mobsense/stats.hpp"

namespace mobsense {

struct AnalysisOptions {
  StudySchedule schedule;
  int tz_offset_minutes = 600;
  int min_days_known = 3;
  CompletenessMode completeness_mode = CompletenessMode::mean_of_kinds;
  ProfileDenominator profile_denominator = ProfileDenominator::all_study_days;
  ClusterOptions cluster;
  CircadianOptions circadian;
  DischargeOptions discharge;
  bool parallel = true;
};

struct WeekCircadian {
  int week = 0;
  double interval_minutes = 0;
  std::optional<double> circadian_movement;
};

// Aggregation container for one participant's extracted features.
struct ParticipantFeatures {
  std::string participant_id;
  DeviceOs os = DeviceOs::android;
  std::optional<std::string> device_model;
  CompletenessResult bluetooth_completeness;
  CompletenessResult gps_completeness;
  CompletenessResult battery_completeness;
  double completeness_pct = 0;  // participant-level number (mode-dependent)
  SocialProfile social;
  std::optional<ClusterSet> clusters;
  std::vector<WeekCircadian> circadian_by_week;
  std::vector<DischargeObservation> battery_observations;
};

struct BatterySummary {
  BatteryFit fit;
  std::vector<std::pair<double, double>> lives;  // scan rate -> predicted hours
};

struct StudyReport {
  std::vector<ParticipantFeatures> participants;  // ordered by participant_id
  OsComparison os_completeness;
  std::optional<BatterySummary> battery;
  std::optional<AlphaResult> circadian_alpha;      // across schedule weeks
  std::optional<AnovaResult> circadian_anova;      // effect of scanning interval
  std::string circadian_stats_note;                // why absent, when absent
  int circadian_complete_rows = 0;                 // participants with CM in every week
};

StudyReport analyze(const std::vector<ScanEvent>& events, const AnalysisOptions& opt);

// Round to `digits` significant decimal digits; report floats all pass
// through this so output is stable.
double round_sig(double x, int digits = 6);

nlohmann::ordered_json report_to_json(const StudyReport& report, const AnalysisOptions& opt);

// Plot-ready tables.
void write_completeness_csv(std::ostream& out, const StudyReport& r);
void write_social_csv(std::ostream& out, const StudyReport& r);
void write_clusters_csv(std::ostream& out, const StudyReport& r);
void write_circadian_csv(std::ostream& out, const StudyReport& r);
void write_battery_observations_csv(std::ostream& out, const StudyReport& r);
void write_battery_lives_csv(std::ostream& out, const StudyReport& r);

}  // namespace mobsense
