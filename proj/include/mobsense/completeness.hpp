#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mobsense/model.hpp"
#include "mobsense/stats.hpp"

namespace mobsense {

// Sum over weeks of scans/hour * hours, rounded half-up once at the end.
// The four-week 8/5/4/3-minute schedule gives 9156.
long long scheduled_count(const StudySchedule& schedule);
double scheduled_count_exact(const StudySchedule& schedule);

struct CompletenessResult {
  long long scheduled = 0;
  long long collected = 0;      // distinct in-window timestamps of the kind
  long long out_of_window = 0;  // events of the kind outside every week
  double pct = 0;               // 100 * collected / scheduled
};

// Events must belong to one participant. Duplicate timestamps of the same
// kind count once. Throws std::domain_error when scheduled_count is zero.
CompletenessResult completeness_pct(const std::vector<ScanEvent>& events,
                                    const StudySchedule& schedule, ScanKind kind);

enum class CompletenessMode {
  mean_of_kinds,  // mean of Bluetooth and GPS completeness
  scan_cycles     // scheduled cycles with at least one of Bluetooth/GPS collected
};

double participant_completeness(const std::vector<ScanEvent>& events,
                                const StudySchedule& schedule,
                                CompletenessMode mode = CompletenessMode::mean_of_kinds);

struct GroupCompleteness {
  std::size_t n = 0;
  double mean = 0;
  std::optional<double> sd;  // absent when n < 2
};

struct OsComparison {
  GroupCompleteness android;
  GroupCompleteness ios;
  std::optional<TTestResult> t;  // Student two-sample; absent when degenerate
};

// Per-OS mean and sample standard deviation of per-participant completeness.
OsComparison completeness_by_os(const std::vector<std::pair<DeviceOs, double>>& per_participant);

}  // namespace mobsense
