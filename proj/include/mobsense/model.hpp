#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mobsense {

enum class DeviceOs { android, ios };
enum class ScanKind { bluetooth, gps, battery };

const char* to_string(DeviceOs os);
const char* to_string(ScanKind k);
std::optional<DeviceOs> parse_device_os(const std::string& s);
std::optional<ScanKind> parse_scan_kind(const std::string& s);

struct BluetoothSighting {
  std::string hashed_device_id;    // 64-char lowercase hex
  std::uint32_t class_of_device = 0;  // 24-bit field

  bool operator==(const BluetoothSighting&) const = default;
};

struct BluetoothScan {
  std::vector<BluetoothSighting> sightings;  // may be empty

  bool operator==(const BluetoothScan&) const = default;
};

struct GpsFix {
  double latitude = 0;
  double longitude = 0;
  std::optional<double> accuracy_m;

  bool operator==(const GpsFix&) const = default;
};

struct BatterySample {
  double level_pct = 0;
  bool charging = false;

  bool operator==(const BatterySample&) const = default;
};

// One timestamped sensor observation. Immutable after validation; safe to
// share read-only across workers.
struct ScanEvent {
  std::string participant_id;
  DeviceOs device_os = DeviceOs::android;
  std::optional<std::string> device_model;
  std::int64_t timestamp = 0;  // UTC seconds since epoch
  ScanKind kind = ScanKind::bluetooth;
  std::variant<BluetoothScan, GpsFix, BatterySample> payload;

  bool operator==(const ScanEvent&) const = default;
};

struct ScheduleWeek {
  std::int64_t start = 0;  // UTC seconds, inclusive
  std::int64_t end = 0;    // exclusive
  double interval_minutes = 0;

  double hours() const { return static_cast<double>(end - start) / 3600.0; }
  double scans_per_hour() const { return 60.0 / interval_minutes; }
};

// Ordered, non-overlapping scan intervals for one deployment.
struct StudySchedule {
  std::vector<ScheduleWeek> weeks;

  std::int64_t start() const;
  std::int64_t end() const;
  bool contains(std::int64_t ts) const;
  std::optional<int> week_of(std::int64_t ts) const;
};

// nullopt when every invariant holds, otherwise a "field: problem" message.
std::optional<std::string> validate_event(const ScanEvent& e);
std::optional<std::string> validate_schedule(const StudySchedule& s);

// Four consecutive 7-day weeks at 8/5/4/3-minute scan intervals
// (7.5, 12, 15 and 20 scans per hour).
StudySchedule four_week_schedule(std::int64_t start_ts = 1520208000);  // 2018-03-05T00:00:00Z

}  // namespace mobsense
