#include "mobsense/model.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace mobsense {

const char* to_string(DeviceOs os) { return os == DeviceOs::android ? "android" : "ios"; }

const char* to_string(ScanKind k) {
  switch (k) {
    case ScanKind::bluetooth: return "bluetooth";
    case ScanKind::gps: return "gps";
    default: return "battery";
  }
}

std::optional<DeviceOs> parse_device_os(const std::string& s) {
  if (s == "android") return DeviceOs::android;
  if (s == "ios") return DeviceOs::ios;
  return std::nullopt;
}

std::optional<ScanKind> parse_scan_kind(const std::string& s) {
  if (s == "bluetooth") return ScanKind::bluetooth;
  if (s == "gps") return ScanKind::gps;
  if (s == "battery") return ScanKind::battery;
  return std::nullopt;
}

std::int64_t StudySchedule::start() const { return weeks.empty() ? 0 : weeks.front().start; }
std::int64_t StudySchedule::end() const { return weeks.empty() ? 0 : weeks.back().end; }

bool StudySchedule::contains(std::int64_t ts) const { return week_of(ts).has_value(); }

std::optional<int> StudySchedule::week_of(std::int64_t ts) const {
  for (std::size_t i = 0; i < weeks.size(); ++i)
    if (ts >= weeks[i].start && ts < weeks[i].end) return static_cast<int>(i);
  return std::nullopt;
}

namespace {

bool is_lower_hex(const std::string& s) {
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

std::optional<std::string> check_bluetooth(const BluetoothScan& scan) {
  std::set<std::string> seen;
  for (const auto& s : scan.sightings) {
    if (s.hashed_device_id.size() != 64)
      return "hashed_device_id: length must be 64, got " + std::to_string(s.hashed_device_id.size());
    if (!is_lower_hex(s.hashed_device_id))
      return "hashed_device_id: not lowercase hex: " + s.hashed_device_id;
    if (s.class_of_device >= (1u << 24))
      return "class_of_device: exceeds 24 bits: " + std::to_string(s.class_of_device);
    if (!seen.insert(s.hashed_device_id).second)
      return "sightings: duplicate hashed_device_id within one scan: " + s.hashed_device_id;
  }
  return std::nullopt;
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::optional<std::string> validate_event(const ScanEvent& e) {
  if (e.participant_id.empty()) return "participant_id: empty";
  const std::size_t want = static_cast<std::size_t>(e.kind);
  if (e.payload.index() != want)
    return std::string("kind/payload mismatch: kind=") + to_string(e.kind);
  switch (e.kind) {
    case ScanKind::bluetooth:
      return check_bluetooth(std::get<BluetoothScan>(e.payload));
    case ScanKind::gps: {
      const auto& g = std::get<GpsFix>(e.payload);
      if (!(g.latitude >= -90.0 && g.latitude <= 90.0))
        return "latitude out of range: " + num(g.latitude);
      if (!(g.longitude >= -180.0 && g.longitude <= 180.0))
        return "longitude out of range: " + num(g.longitude);
      if (g.accuracy_m && !(*g.accuracy_m >= 0.0))
        return "accuracy_m negative: " + num(*g.accuracy_m);
      return std::nullopt;
    }
    case ScanKind::battery: {
      const auto& b = std::get<BatterySample>(e.payload);
      if (!(b.level_pct >= 0.0 && b.level_pct <= 100.0))
        return "level_pct out of range: " + num(b.level_pct);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate_schedule(const StudySchedule& s) {
  for (std::size_t i = 0; i < s.weeks.size(); ++i) {
    const auto& w = s.weeks[i];
    if (!(w.interval_minutes > 0)) return "interval_minutes must be positive";
    if (w.end <= w.start) return "week end must be after start";
    if (i > 0 && w.start < s.weeks[i - 1].end) return "weeks overlap or are out of order";
  }
  return std::nullopt;
}

StudySchedule four_week_schedule(std::int64_t start_ts) {
  constexpr std::int64_t week = 7 * 24 * 3600;
  StudySchedule s;
  const double intervals[] = {8, 5, 4, 3};
  for (int i = 0; i < 4; ++i)
    s.weeks.push_back({start_ts + i * week, start_ts + (i + 1) * week, intervals[i]});
  return s;
}

}  // namespace mobsense
