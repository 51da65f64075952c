#include "mobsense/completeness.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace mobsense {

double scheduled_count_exact(const StudySchedule& schedule) {
  double total = 0;
  for (const auto& w : schedule.weeks) total += w.scans_per_hour() * w.hours();
  return total;
}

long long scheduled_count(const StudySchedule& schedule) {
  return static_cast<long long>(std::floor(scheduled_count_exact(schedule) + 0.5));
}

CompletenessResult completeness_pct(const std::vector<ScanEvent>& events,
                                    const StudySchedule& schedule, ScanKind kind) {
  CompletenessResult r;
  r.scheduled = scheduled_count(schedule);
  if (r.scheduled == 0) throw std::domain_error("completeness_pct: scheduled count is zero");
  std::set<std::int64_t> seen;
  for (const auto& e : events) {
    if (e.kind != kind) continue;
    if (!schedule.contains(e.timestamp)) {
      ++r.out_of_window;
      continue;
    }
    seen.insert(e.timestamp);
  }
  r.collected = static_cast<long long>(seen.size());
  r.pct = 100.0 * static_cast<double>(r.collected) / static_cast<double>(r.scheduled);
  return r;
}

double participant_completeness(const std::vector<ScanEvent>& events,
                                const StudySchedule& schedule, CompletenessMode mode) {
  if (mode == CompletenessMode::mean_of_kinds) {
    const auto bt = completeness_pct(events, schedule, ScanKind::bluetooth);
    const auto gps = completeness_pct(events, schedule, ScanKind::gps);
    return (bt.pct + gps.pct) / 2.0;
  }
  // A scan cycle counts once when any of its Bluetooth/GPS records arrived.
  const long long scheduled = scheduled_count(schedule);
  if (scheduled == 0) throw std::domain_error("participant_completeness: scheduled count is zero");
  std::set<std::int64_t> cycles;
  for (const auto& e : events) {
    if (e.kind == ScanKind::battery) continue;
    if (schedule.contains(e.timestamp)) cycles.insert(e.timestamp);
  }
  return 100.0 * static_cast<double>(cycles.size()) / static_cast<double>(scheduled);
}

namespace {

GroupCompleteness summarize(const std::vector<double>& xs) {
  GroupCompleteness g;
  g.n = xs.size();
  if (xs.empty()) return g;
  g.mean = sample_mean(xs);
  if (xs.size() >= 2) g.sd = sample_sd(xs);
  return g;
}

}  // namespace

OsComparison completeness_by_os(const std::vector<std::pair<DeviceOs, double>>& per_participant) {
  std::vector<double> android, ios;
  for (const auto& [os, pct] : per_participant)
    (os == DeviceOs::android ? android : ios).push_back(pct);
  OsComparison cmp;
  cmp.android = summarize(android);
  cmp.ios = summarize(ios);
  if (android.size() >= 2 && ios.size() >= 2) {
    try {
      cmp.t = two_sample_t(android, ios, false);
    } catch (const std::domain_error&) {
      // zero pooled variance; comparison stays absent
    }
  }
  return cmp;
}

}  // namespace mobsense
