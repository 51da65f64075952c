#include "mobsense/ingest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mobsense/timeutil.hpp"

namespace mobsense {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<MacAddress> parse_mac(const std::string& s) {
  std::string hex;
  hex.reserve(12);
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == ':' || c == '-') {
      if ((i + 1) % 3 != 0) return std::nullopt;  // separators every two digits
      continue;
    }
    if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
    hex.push_back(c);
  }
  if (hex.size() != 12) return std::nullopt;
  if (s.size() != 12 && s.size() != 17) return std::nullopt;
  MacAddress mac{};
  auto nib = [](char c) -> std::uint8_t {
    return static_cast<std::uint8_t>(c <= '9' ? c - '0' : c - 'a' + 10);
  };
  for (int i = 0; i < 6; ++i)
    mac[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((nib(hex[2 * i]) << 4) | nib(hex[2 * i + 1]));
  return mac;
}

std::string format_mac(const MacAddress& mac) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", mac[0], mac[1], mac[2],
                mac[3], mac[4], mac[5]);
  return buf;
}

std::string hash_device_id(const MacAddress& mac, const HashConfig& cfg) {
  if (!cfg.valid())
    throw std::invalid_argument("hash salt is empty; pass a salt or allow unsalted hashing");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            (cfg.salt.empty() ||
             EVP_DigestUpdate(ctx, cfg.salt.data(), cfg.salt.size()) == 1) &&
            EVP_DigestUpdate(ctx, mac.data(), mac.size()) == 1 &&
            EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-256 computation failed");
  static const char* hexd = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(len) * 2, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hexd[digest[i] >> 4];
    out[2 * i + 1] = hexd[digest[i] & 0xF];
  }
  return out;
}

bool is_phone_device(std::uint32_t class_of_device) {
  return (class_of_device & 0x1F00u) == 0x0200u;
}

namespace {

// Throwing helpers keep the per-line parser flat; the catch below turns any
// failure into one ParseError for that line.
struct LineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LineError(std::string("missing key: ") + key);
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw LineError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number()) throw LineError(std::string(key) + ": expected a number");
  return v.get<double>();
}

ScanEvent parse_record(const json& rec, const IngestOptions& opt) {
  if (!rec.is_object()) throw LineError("record is not a JSON object");
  ScanEvent e;
  e.participant_id = require_string(rec, "participant_id");

  const std::string os_s = require_string(rec, "device_os");
  auto os = parse_device_os(os_s);
  if (!os) throw LineError("device_os: unknown value: " + os_s);
  e.device_os = *os;

  if (auto it = rec.find("device_model"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw LineError("device_model: expected a string");
    e.device_model = it->get<std::string>();
  }

  const std::string ts_s = require_string(rec, "timestamp");
  auto ts = parse_iso8601(ts_s);
  if (!ts) throw LineError("timestamp: not ISO 8601 with offset: " + ts_s);
  e.timestamp = *ts;

  const std::string kind_s = require_string(rec, "kind");
  auto kind = parse_scan_kind(kind_s);
  if (!kind) throw LineError("kind: unknown value: " + kind_s);
  e.kind = *kind;

  const json& payload = require(rec, "payload");
  if (!payload.is_object()) throw LineError("payload: expected an object");

  switch (e.kind) {
    case ScanKind::bluetooth: {
      BluetoothScan scan;
      const json& sightings = require(payload, "sightings");
      if (!sightings.is_array()) throw LineError("sightings: expected an array");
      for (const auto& s : sightings) {
        if (!s.is_object()) throw LineError("sighting: expected an object");
        BluetoothSighting bs;
        const double cod = require_number(s, "class_of_device");
        if (cod < 0 || cod != static_cast<double>(static_cast<std::uint64_t>(cod)))
          throw LineError("class_of_device: expected a non-negative integer");
        bs.class_of_device = static_cast<std::uint32_t>(cod);
        if (auto it = s.find("hashed_device_id"); it != s.end()) {
          if (!it->is_string()) throw LineError("hashed_device_id: expected a string");
          bs.hashed_device_id = it->get<std::string>();
        } else if (auto mit = s.find("mac"); mit != s.end()) {
          if (!mit->is_string()) throw LineError("mac: expected a string");
          auto mac = parse_mac(mit->get<std::string>());
          if (!mac) throw LineError("mac: malformed identifier: " + mit->get<std::string>());
          bs.hashed_device_id = hash_device_id(*mac, opt.hash);
        } else {
          throw LineError("sighting: needs mac or hashed_device_id");
        }
        if (opt.filter_phones && !is_phone_device(bs.class_of_device)) continue;
        scan.sightings.push_back(std::move(bs));
      }
      e.payload = std::move(scan);
      break;
    }
    case ScanKind::gps: {
      GpsFix fix;
      fix.latitude = require_number(payload, "latitude");
      fix.longitude = require_number(payload, "longitude");
      if (auto it = payload.find("accuracy_m"); it != payload.end() && !it->is_null()) {
        if (!it->is_number()) throw LineError("accuracy_m: expected a number");
        fix.accuracy_m = it->get<double>();
      }
      e.payload = fix;
      break;
    }
    case ScanKind::battery: {
      BatterySample b;
      b.level_pct = require_number(payload, "level_pct");
      const json& ch = require(payload, "charging");
      if (!ch.is_boolean()) throw LineError("charging: expected a boolean");
      b.charging = ch.get<bool>();
      e.payload = b;
      break;
    }
  }

  if (auto err = validate_event(e)) throw LineError(*err);
  return e;
}

bool blank(const std::string& s) {
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

}  // namespace

ParseResult parse_scan_log(std::istream& in, const IngestOptions& opt) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      json rec = json::parse(line);
      result.events.push_back(parse_record(rec, opt));
    } catch (const json::exception& e) {
      result.errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
    } catch (const std::exception& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  if (in.bad()) throw std::runtime_error("stream error while reading scan log");
  return result;
}

ParseResult parse_scan_log_file(const std::string& path, const IngestOptions& opt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan log: " + path);
  return parse_scan_log(in, opt);
}

std::string to_json_line(const ScanEvent& e) {
  ordered_json rec;
  rec["participant_id"] = e.participant_id;
  rec["device_os"] = to_string(e.device_os);
  if (e.device_model) rec["device_model"] = *e.device_model;
  rec["timestamp"] = format_iso8601_utc(e.timestamp);
  rec["kind"] = to_string(e.kind);
  ordered_json payload;
  switch (e.kind) {
    case ScanKind::bluetooth: {
      const auto& scan = std::get<BluetoothScan>(e.payload);
      ordered_json arr = ordered_json::array();
      for (const auto& s : scan.sightings) {
        ordered_json o;
        o["hashed_device_id"] = s.hashed_device_id;
        o["class_of_device"] = s.class_of_device;
        arr.push_back(std::move(o));
      }
      payload["sightings"] = std::move(arr);
      break;
    }
    case ScanKind::gps: {
      const auto& g = std::get<GpsFix>(e.payload);
      payload["latitude"] = g.latitude;
      payload["longitude"] = g.longitude;
      if (g.accuracy_m) payload["accuracy_m"] = *g.accuracy_m;
      break;
    }
    case ScanKind::battery: {
      const auto& b = std::get<BatterySample>(e.payload);
      payload["level_pct"] = b.level_pct;
      payload["charging"] = b.charging;
      break;
    }
  }
  rec["payload"] = std::move(payload);
  return rec.dump();
}

StudySchedule schedule_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("schedule: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("weeks") || !doc["weeks"].is_array())
    throw std::runtime_error("schedule: expected an object with a \"weeks\" array");
  StudySchedule s;
  for (const auto& w : doc["weeks"]) {
    ScheduleWeek week;
    if (!w.is_object() || !w.contains("start") || !w.contains("end") ||
        !w.contains("interval_minutes"))
      throw std::runtime_error("schedule week: needs start, end, interval_minutes");
    auto get_ts = [&](const char* key) {
      const auto& v = w[key];
      if (v.is_string()) {
        auto ts = parse_iso8601(v.get<std::string>());
        if (!ts) throw std::runtime_error(std::string("schedule ") + key + ": bad timestamp");
        return *ts;
      }
      if (v.is_number_integer()) return v.get<std::int64_t>();
      throw std::runtime_error(std::string("schedule ") + key +
                               ": expected ISO 8601 string or epoch seconds");
    };
    week.start = get_ts("start");
    week.end = get_ts("end");
    if (!w["interval_minutes"].is_number())
      throw std::runtime_error("schedule interval_minutes: expected a number");
    week.interval_minutes = w["interval_minutes"].get<double>();
    s.weeks.push_back(week);
  }
  if (auto err = validate_schedule(s)) throw std::runtime_error("schedule: " + *err);
  return s;
}

StudySchedule schedule_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_json(buf.str());
}

std::string schedule_to_json(const StudySchedule& s) {
  ordered_json doc;
  ordered_json weeks = ordered_json::array();
  for (const auto& w : s.weeks) {
    ordered_json o;
    o["start"] = format_iso8601_utc(w.start);
    o["end"] = format_iso8601_utc(w.end);
    o["interval_minutes"] = w.interval_minutes;
    weeks.push_back(std::move(o));
  }
  doc["weeks"] = std::move(weeks);
  return doc.dump(2);
}

}  // namespace mobsense
