#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mobsense/model.hpp"

namespace mobsense {

struct HashConfig {
  std::string salt;             // study-wide secret prepended to the identifier
  bool allow_unsalted = false;  // permit an empty salt for dataset compatibility

  bool valid() const { return !salt.empty() || allow_unsalted; }
};

using MacAddress = std::array<std::uint8_t, 6>;

// "aa:bb:cc:dd:ee:ff", "AA-BB-CC-DD-EE-FF" or bare "aabbccddeeff".
std::optional<MacAddress> parse_mac(const std::string& s);
std::string format_mac(const MacAddress& mac);

// Lowercase hex SHA-256 of salt || identifier bytes. Deterministic: equal
// (mac, salt) give equal output.
std::string hash_device_id(const MacAddress& mac, const HashConfig& cfg);

// True iff the major-device-class field (bits 12-8 of the Class of Device)
// is the Phone class: (cod & 0x1F00) == 0x0200.
bool is_phone_device(std::uint32_t class_of_device);

struct ParseError {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<ScanEvent> events;
  std::vector<ParseError> errors;
};

struct IngestOptions {
  HashConfig hash;
  bool filter_phones = false;  // drop sightings whose class is not Phone
};

// One JSON object per line: {participant_id, device_os, device_model?,
// timestamp, kind, payload}. Bluetooth sightings carry either a raw "mac"
// (hashed here) or a pre-hashed "hashed_device_id". Malformed lines become
// errors with their line number; the batch never aborts.
ParseResult parse_scan_log(std::istream& in, const IngestOptions& opt);
ParseResult parse_scan_log_file(const std::string& path, const IngestOptions& opt);

// Canonical (deidentified) line format; inverse of the parser.
std::string to_json_line(const ScanEvent& e);

// StudySchedule as JSON: {"weeks": [{"start", "end", "interval_minutes"}]}.
StudySchedule schedule_from_json(const std::string& text);      // throws std::runtime_error
StudySchedule schedule_from_file(const std::string& path);      // throws std::runtime_error
std::string schedule_to_json(const StudySchedule& s);

}  // namespace mobsense
