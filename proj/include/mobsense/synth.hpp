#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mobsense/ingest.hpp"
#include "mobsense/model.hpp"

namespace mobsense {

struct ParticipantSpec {
  DeviceOs os = DeviceOs::android;
  std::string device_model = "synth-handset";
  // Movement: cluster_count centers on a daily loop, visited in order over
  // each 24-hour period, positions jittered by gps_noise_m.
  int cluster_count = 4;
  double cluster_separation_m = 5000;
  double routine_amplitude_m = 2000;  // loop radius floor
  double period_hours = 24;
  double routine_adherence = 1.0;  // probability a scan is at the scheduled stop
  double gps_noise_m = 20;
  double home_lat = -33.87;
  double home_lon = 151.21;
  // Delivery: each scheduled (scan, kind) is emitted with this probability.
  double delivery_probability = 1.0;
  // Bluetooth: household phones at night, fresh crowd phones 9:00-17:00.
  int household_devices = 2;
  double crowd_rate = 5.0;  // mean crowd phones per working-hour scan
  double household_presence = 0.9;
  // Battery: level drains at c0 + k * scans/hour, daily reset to 100%.
  double battery_c0 = 3.0;
  double battery_k = 0.04;
  double battery_noise = 0.1;        // per-week uniform rate perturbation, +-
  double battery_level_noise = 0.0;  // per-sample uniform level jitter, +-
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int n_participants = 1;
  StudySchedule schedule = four_week_schedule();
  int tz_offset_minutes = 600;
  std::string salt = "synthetic-study";
  bool well_separated = true;  // enforce separation > 4x the 500 m rule
  ParticipantSpec defaults;
  // Per-participant overrides; entry i (when present) replaces defaults for
  // participant i.
  std::vector<std::optional<ParticipantSpec>> participants;

  ParticipantSpec spec_for(int i) const;
};

struct ManifestParticipant {
  std::string participant_id;
  DeviceOs os;
  int cluster_count = 0;
  std::vector<std::pair<double, double>> cluster_centers;  // lat, lon
  double routine_amplitude_m = 0;
  double period_hours = 24;
  double routine_adherence = 1;
  double delivery_probability = 1;
  double battery_c0 = 0;
  double battery_k = 0;
  // Devices sighted on >= 3 distinct emitted local dates; consistent with the
  // emitted records by construction.
  std::set<std::string> known_device_hashes;
  std::map<std::string, long long> emitted;  // kind -> records actually written
};

struct GroundTruthManifest {
  std::uint64_t seed = 0;
  long long scheduled_per_kind = 0;
  int tz_offset_minutes = 600;
  std::string salt;
  std::vector<ManifestParticipant> participants;
};

// Writes ingest-schema JSONL (raw MAC identifiers; hashing happens at ingest).
// Identical configs produce byte-identical output. Throws std::invalid_argument
// on infeasible configs.
GroundTruthManifest generate(const SynthConfig& cfg, std::ostream& out);

SynthConfig synth_config_from_json(const std::string& text);
std::string manifest_to_json(const GroundTruthManifest& m);

}  // namespace mobsense
