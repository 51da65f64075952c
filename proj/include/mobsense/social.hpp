#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mobsense/model.hpp"

namespace mobsense {

struct DeviceHistory {
  std::set<std::int64_t> days;  // distinct local calendar dates (day indices)
  long long sightings = 0;
};

struct DevicePartition {
  std::set<std::string> known;    // seen on >= min_days distinct local dates
  std::set<std::string> unknown;  // everything else that was sighted
  std::map<std::string, DeviceHistory> history;
};

// Partition is exhaustive and disjoint over all sighted devices.
DevicePartition classify_devices(const std::vector<ScanEvent>& events,
                                 int min_days = 3, int tz_offset_minutes = 600);

enum class ProfileDenominator {
  all_study_days,  // every local date in the window, scans or not
  observed_days    // only dates with at least one Bluetooth scan
};

struct SocialProfileRow {
  int hour = 0;
  double mean_known = 0;
  double mean_unknown = 0;
};

struct SocialProfile {
  std::array<SocialProfileRow, 24> rows{};
  long long denominator_days = 0;
};

// Mean count of distinct known/unknown devices sighted during each local
// hour of day, averaged over days. The window comes from the schedule when
// given, otherwise from the observed event span.
SocialProfile social_profile(const std::vector<ScanEvent>& events,
                             const DevicePartition& partition,
                             int tz_offset_minutes = 600,
                             ProfileDenominator denom = ProfileDenominator::all_study_days,
                             const StudySchedule* schedule = nullptr);

}  // namespace mobsense
