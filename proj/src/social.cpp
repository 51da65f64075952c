#include "mobsense/social.hpp"

#include <algorithm>

#include "mobsense/timeutil.hpp"

namespace mobsense {

DevicePartition classify_devices(const std::vector<ScanEvent>& events, int min_days,
                                 int tz_offset_minutes) {
  DevicePartition p;
  for (const auto& e : events) {
    if (e.kind != ScanKind::bluetooth) continue;
    const auto date = local_date_index(e.timestamp, tz_offset_minutes);
    for (const auto& s : std::get<BluetoothScan>(e.payload).sightings) {
      auto& h = p.history[s.hashed_device_id];
      h.days.insert(date);
      ++h.sightings;
    }
  }
  for (const auto& [id, h] : p.history) {
    if (static_cast<int>(h.days.size()) >= min_days)
      p.known.insert(id);
    else
      p.unknown.insert(id);
  }
  return p;
}

SocialProfile social_profile(const std::vector<ScanEvent>& events,
                             const DevicePartition& partition, int tz_offset_minutes,
                             ProfileDenominator denom, const StudySchedule* schedule) {
  SocialProfile profile;
  for (int h = 0; h < 24; ++h) profile.rows[static_cast<std::size_t>(h)].hour = h;

  // Distinct devices sighted per (local date, hour).
  std::map<std::pair<std::int64_t, int>, std::pair<std::set<std::string>, std::set<std::string>>>
      cells;
  std::set<std::int64_t> scan_dates;
  std::int64_t min_date = 0, max_date = -1;
  bool any = false;
  for (const auto& e : events) {
    if (e.kind != ScanKind::bluetooth) continue;
    const auto date = local_date_index(e.timestamp, tz_offset_minutes);
    const int hour = local_hour(e.timestamp, tz_offset_minutes);
    scan_dates.insert(date);
    if (!any || date < min_date) min_date = date;
    if (!any || date > max_date) max_date = date;
    any = true;
    auto& cell = cells[{date, hour}];
    for (const auto& s : std::get<BluetoothScan>(e.payload).sightings) {
      if (partition.known.count(s.hashed_device_id))
        cell.first.insert(s.hashed_device_id);
      else
        cell.second.insert(s.hashed_device_id);
    }
  }

  long long days = 0;
  if (denom == ProfileDenominator::observed_days) {
    days = static_cast<long long>(scan_dates.size());
  } else if (schedule && !schedule->weeks.empty()) {
    const auto first = local_date_index(schedule->start(), tz_offset_minutes);
    const auto last = local_date_index(schedule->end() - 1, tz_offset_minutes);
    days = last - first + 1;
  } else if (any) {
    days = max_date - min_date + 1;
  }
  profile.denominator_days = days;
  if (days == 0) return profile;

  for (const auto& [key, cell] : cells) {
    auto& row = profile.rows[static_cast<std::size_t>(key.second)];
    row.mean_known += static_cast<double>(cell.first.size());
    row.mean_unknown += static_cast<double>(cell.second.size());
  }
  for (auto& row : profile.rows) {
    row.mean_known /= static_cast<double>(days);
    row.mean_unknown /= static_cast<double>(days);
  }
  return profile;
}

}  // namespace mobsense
