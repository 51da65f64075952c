#include "mobsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "mobsense/geo.hpp"
#include "mobsense/rng.hpp"
#include "mobsense/timeutil.hpp"

namespace mobsense {

using nlohmann::json;
using nlohmann::ordered_json;

ParticipantSpec SynthConfig::spec_for(int i) const {
  const auto idx = static_cast<std::size_t>(i);
  if (idx < participants.size() && participants[idx]) return *participants[idx];
  return defaults;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kResetHour = 6.0;        // daily recharge to 100% at 06:00 local
constexpr std::int64_t kChargeSecs = 1800;

// Substream tags for the counter RNG; one purpose per tag.
enum : std::uint64_t {
  kStreamDelivery = 1,
  kStreamGpsNoise = 2,
  kStreamCrowd = 3,
  kStreamHousehold = 4,
  kStreamBatteryRate = 5,
  kStreamAdherence = 6,
};

CounterRng scan_rng(const SynthConfig& cfg, int participant, std::uint64_t purpose,
                    std::uint64_t scan) {
  return CounterRng{cfg.seed, static_cast<std::uint64_t>(participant) + 1,
                    mix64(purpose) ^ scan, 0};
}

void validate_spec(const SynthConfig& cfg, const ParticipantSpec& s, int idx) {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("synth config, participant " + std::to_string(idx) + ": " + msg);
  };
  if (s.cluster_count < 1) fail("cluster_count must be >= 1");
  if (s.delivery_probability < 0 || s.delivery_probability > 1)
    fail("delivery_probability must be in [0,1]");
  if (s.routine_adherence < 0 || s.routine_adherence > 1)
    fail("routine_adherence must be in [0,1]");
  if (s.period_hours <= 0) fail("period_hours must be positive");
  if (s.gps_noise_m < 0 || s.crowd_rate < 0 || s.household_devices < 0 ||
      s.battery_noise < 0 || s.battery_level_noise < 0)
    fail("negative noise/rate parameter");
  if (s.household_presence < 0 || s.household_presence > 1)
    fail("household_presence must be in [0,1]");
  if (s.cluster_count >= 2) {
    if (6.0 * s.gps_noise_m >= s.cluster_separation_m)
      fail("cluster radius (6x gps_noise_m) must stay below the separation");
    if (cfg.well_separated && s.cluster_separation_m <= 4.0 * 500.0)
      fail("well-separated mode needs cluster_separation_m > 2000");
  }
}

struct Geometry {
  std::vector<PlanePoint> centers;  // local meters around home
  double loop_radius_m = 0;
  LocalProjection projection;
};

Geometry make_geometry(const ParticipantSpec& s) {
  Geometry g;
  g.projection = {s.home_lat, s.home_lon};
  const int k = s.cluster_count;
  if (k == 1) {
    g.centers.push_back({0, 0});
    g.loop_radius_m = 0;
    return g;
  }
  const double needed = s.cluster_separation_m / (2.0 * std::sin(kTwoPi / 2.0 / k));
  g.loop_radius_m = std::max(s.routine_amplitude_m, needed);
  for (int j = 0; j < k; ++j) {
    const double phi = kTwoPi * j / k;
    g.centers.push_back({g.loop_radius_m * std::cos(phi), g.loop_radius_m * std::sin(phi)});
  }
  return g;
}

MacAddress household_mac(int participant, int device) {
  return MacAddress{0x02, 0x4d, static_cast<std::uint8_t>(participant >> 8),
                    static_cast<std::uint8_t>(participant), 0x00,
                    static_cast<std::uint8_t>(device)};
}

MacAddress crowd_mac(int participant, std::uint64_t scan, int slot) {
  return MacAddress{0x06,
                    static_cast<std::uint8_t>(participant),
                    static_cast<std::uint8_t>(scan >> 16),
                    static_cast<std::uint8_t>(scan >> 8),
                    static_cast<std::uint8_t>(scan),
                    static_cast<std::uint8_t>(slot)};
}

void write_line(std::ostream& out, const std::string& pid, const ParticipantSpec& s,
                std::int64_t ts, const char* kind, const std::string& payload) {
  out << "{\"participant_id\":" << json(pid).dump() << ",\"device_os\":\"" << to_string(s.os)
      << "\",\"device_model\":" << json(s.device_model).dump() << ",\"timestamp\":\""
      << format_iso8601_utc(ts) << "\",\"kind\":\"" << kind << "\",\"payload\":" << payload
      << "}\n";
}

std::string fmt_num(double v) {
  // Shortest representation that round-trips, same as the JSON library uses.
  return json(v).dump();
}

}  // namespace

GroundTruthManifest generate(const SynthConfig& cfg, std::ostream& out) {
  if (cfg.n_participants < 1)
    throw std::invalid_argument("synth config: n_participants must be >= 1");
  if (auto err = validate_schedule(cfg.schedule))
    throw std::invalid_argument("synth config: " + *err);
  if (cfg.schedule.weeks.empty())
    throw std::invalid_argument("synth config: schedule has no weeks");
  for (int i = 0; i < cfg.n_participants; ++i) validate_spec(cfg, cfg.spec_for(i), i);

  // Scheduled scan instants, shared by every participant and kind.
  std::vector<std::pair<std::int64_t, int>> scans;  // (ts, week index)
  for (std::size_t w = 0; w < cfg.schedule.weeks.size(); ++w) {
    const auto& week = cfg.schedule.weeks[w];
    const auto step = static_cast<std::int64_t>(std::llround(week.interval_minutes * 60.0));
    if (step <= 0) throw std::invalid_argument("synth config: interval too small");
    for (std::int64_t t = week.start; t < week.end; t += step)
      scans.emplace_back(t, static_cast<int>(w));
  }

  GroundTruthManifest manifest;
  manifest.seed = cfg.seed;
  manifest.scheduled_per_kind = static_cast<long long>(scans.size());
  manifest.tz_offset_minutes = cfg.tz_offset_minutes;
  manifest.salt = cfg.salt;

  const HashConfig hash_cfg{cfg.salt, true};

  for (int pi = 0; pi < cfg.n_participants; ++pi) {
    const ParticipantSpec spec = cfg.spec_for(pi);
    char pid_buf[16];
    std::snprintf(pid_buf, sizeof(pid_buf), "p%03d", pi + 1);
    const std::string pid = pid_buf;

    const Geometry geom = make_geometry(spec);
    const int k = spec.cluster_count;

    // Per-week discharge rates: c0 + k_slope * scans/hour, plus a small drift.
    std::vector<double> week_rate(cfg.schedule.weeks.size());
    for (std::size_t w = 0; w < week_rate.size(); ++w) {
      CounterRng rng{cfg.seed, static_cast<std::uint64_t>(pi) + 1,
                     mix64(kStreamBatteryRate) ^ w, 0};
      const double drift = spec.battery_noise * (2.0 * rng.next_unit() - 1.0);
      week_rate[w] =
          spec.battery_c0 + spec.battery_k * cfg.schedule.weeks[w].scans_per_hour() + drift;
    }

    double level = 80.0;
    std::int64_t prev_ts = cfg.schedule.start();
    std::int64_t last_reset_date = local_date_index(prev_ts, cfg.tz_offset_minutes) - 1;
    std::int64_t charge_end = prev_ts - 1;

    std::map<std::string, std::set<std::int64_t>> device_dates;
    std::map<std::string, long long> emitted{{"bluetooth", 0}, {"gps", 0}, {"battery", 0}};

    for (std::uint64_t g = 0; g < scans.size(); ++g) {
      const std::int64_t ts = scans[g].first;
      const int week = scans[g].second;
      const int hour = local_hour(ts, cfg.tz_offset_minutes);
      const std::int64_t date = local_date_index(ts, cfg.tz_offset_minutes);

      // Battery model advances on every scheduled scan, delivered or not.
      const std::int64_t drain_from = std::max(prev_ts, charge_end);
      if (ts > drain_from)
        level -= week_rate[static_cast<std::size_t>(week)] *
                 static_cast<double>(ts - drain_from) / 3600.0;
      if (level < 0) level = 0;
      if (date != last_reset_date && local_hour_frac(ts, cfg.tz_offset_minutes) >= kResetHour) {
        level = 100.0;
        last_reset_date = date;
        charge_end = ts + kChargeSecs;
      }
      const bool charging = ts < charge_end;
      if (charging) level = 100.0;
      prev_ts = ts;

      auto delivered = [&](std::uint64_t kind_tag) {
        auto rng = scan_rng(cfg, pi, kStreamDelivery * 1000 + kind_tag, g);
        return rng.next_bernoulli(spec.delivery_probability);
      };

      if (delivered(1)) {  // bluetooth
        std::string sightings = "[";
        bool first = true;
        auto add = [&](const MacAddress& mac, unsigned cod) {
          if (!first) sightings += ",";
          first = false;
          sightings += "{\"mac\":\"" + format_mac(mac) + "\",\"class_of_device\":" +
                       std::to_string(cod) + "}";
          device_dates[hash_device_id(mac, hash_cfg)].insert(date);
        };
        if (hour >= 20 || hour < 8) {
          auto rng = scan_rng(cfg, pi, kStreamHousehold, g);
          for (int d = 0; d < spec.household_devices; ++d)
            if (rng.next_bernoulli(spec.household_presence)) add(household_mac(pi, d), 0x20C);
        } else if (hour >= 9 && hour < 17) {
          auto rng = scan_rng(cfg, pi, kStreamCrowd, g);
          int n_crowd = spec.crowd_rate > 0 ? rng.next_poisson(spec.crowd_rate) : 0;
          n_crowd = std::min(n_crowd, 200);
          for (int c = 0; c < n_crowd; ++c)
            add(crowd_mac(pi, g, c), 0x200u + 4u * static_cast<unsigned>(c % 3));
        }
        sightings += "]";
        write_line(out, pid, spec, ts, "bluetooth", "{\"sightings\":" + sightings + "}");
        ++emitted["bluetooth"];
      }

      if (delivered(2)) {  // gps
        auto rng = scan_rng(cfg, pi, kStreamGpsNoise, g);
        int slot = 0;
        if (k > 1) {
          const double local_h =
              static_cast<double>(ts + std::int64_t(cfg.tz_offset_minutes) * 60) / 3600.0;
          const double phase = local_h / spec.period_hours -
                               std::floor(local_h / spec.period_hours);
          slot = std::min(k - 1, static_cast<int>(phase * k));
          if (spec.routine_adherence < 1.0) {
            auto arng = scan_rng(cfg, pi, kStreamAdherence, g);
            if (!arng.next_bernoulli(spec.routine_adherence))
              slot = static_cast<int>(arng.next_below(static_cast<std::uint64_t>(k)));
          }
        }
        PlanePoint p = geom.centers[static_cast<std::size_t>(slot)];
        p.x_m += spec.gps_noise_m * rng.next_normal();
        p.y_m += spec.gps_noise_m * rng.next_normal();
        double lat, lon;
        geom.projection.to_geo(p, lat, lon);
        write_line(out, pid, spec, ts, "gps",
                   "{\"latitude\":" + fmt_num(lat) + ",\"longitude\":" + fmt_num(lon) +
                       ",\"accuracy_m\":10.0}");
        ++emitted["gps"];
      }

      // A phone at 0% is off and uploads no battery sample until it recharges.
      if (delivered(3) && (charging || level > 0)) {
        double emitted_level = level;
        if (spec.battery_level_noise > 0 && !charging) {
          auto rng = scan_rng(cfg, pi, kStreamBatteryRate * 100, g);
          emitted_level += spec.battery_level_noise * (2.0 * rng.next_unit() - 1.0);
          emitted_level = std::min(100.0, std::max(0.0, emitted_level));
        }
        write_line(out, pid, spec, ts, "battery",
                   "{\"level_pct\":" + fmt_num(emitted_level) +
                       ",\"charging\":" + (charging ? "true" : "false") + "}");
        ++emitted["battery"];
      }
    }

    ManifestParticipant mp;
    mp.participant_id = pid;
    mp.os = spec.os;
    mp.cluster_count = k;
    for (const auto& c : geom.centers) {
      double lat, lon;
      geom.projection.to_geo(c, lat, lon);
      mp.cluster_centers.emplace_back(lat, lon);
    }
    mp.routine_amplitude_m = geom.loop_radius_m;
    mp.period_hours = spec.period_hours;
    mp.routine_adherence = spec.routine_adherence;
    mp.delivery_probability = spec.delivery_probability;
    mp.battery_c0 = spec.battery_c0;
    mp.battery_k = spec.battery_k;
    for (const auto& [id, dates] : device_dates)
      if (dates.size() >= 3) mp.known_device_hashes.insert(id);
    mp.emitted = emitted;
    manifest.participants.push_back(std::move(mp));
  }
  return manifest;
}

namespace {

ParticipantSpec spec_from_json(const json& j, ParticipantSpec base) {
  if (j.contains("os")) {
    auto os = parse_device_os(j["os"].get<std::string>());
    if (!os) throw std::runtime_error("synth config: unknown os");
    base.os = *os;
  }
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j[key].get<double>();
  };
  if (j.contains("device_model")) base.device_model = j["device_model"].get<std::string>();
  if (j.contains("cluster_count")) base.cluster_count = j["cluster_count"].get<int>();
  if (j.contains("household_devices"))
    base.household_devices = j["household_devices"].get<int>();
  get("cluster_separation_m", base.cluster_separation_m);
  get("routine_amplitude_m", base.routine_amplitude_m);
  get("period_hours", base.period_hours);
  get("routine_adherence", base.routine_adherence);
  get("gps_noise_m", base.gps_noise_m);
  get("home_lat", base.home_lat);
  get("home_lon", base.home_lon);
  get("delivery_probability", base.delivery_probability);
  get("crowd_rate", base.crowd_rate);
  get("household_presence", base.household_presence);
  get("battery_c0", base.battery_c0);
  get("battery_k", base.battery_k);
  get("battery_noise", base.battery_noise);
  get("battery_level_noise", base.battery_level_noise);
  return base;
}

}  // namespace

SynthConfig synth_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("synth config: invalid JSON: ") + e.what());
  }
  SynthConfig cfg;
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("n_participants")) cfg.n_participants = doc["n_participants"].get<int>();
  if (doc.contains("schedule")) cfg.schedule = schedule_from_json(doc["schedule"].dump());
  if (doc.contains("tz_offset")) {
    auto off = parse_tz_offset_minutes(doc["tz_offset"].get<std::string>());
    if (!off) throw std::runtime_error("synth config: bad tz_offset");
    cfg.tz_offset_minutes = *off;
  }
  if (doc.contains("tz_offset_minutes")) cfg.tz_offset_minutes = doc["tz_offset_minutes"].get<int>();
  if (doc.contains("salt")) cfg.salt = doc["salt"].get<std::string>();
  if (doc.contains("well_separated")) cfg.well_separated = doc["well_separated"].get<bool>();
  if (doc.contains("defaults")) cfg.defaults = spec_from_json(doc["defaults"], cfg.defaults);
  if (doc.contains("participants")) {
    for (const auto& p : doc["participants"]) {
      if (p.is_null())
        cfg.participants.emplace_back(std::nullopt);
      else
        cfg.participants.emplace_back(spec_from_json(p, cfg.defaults));
    }
  }
  return cfg;
}

std::string manifest_to_json(const GroundTruthManifest& m) {
  ordered_json doc;
  doc["seed"] = m.seed;
  doc["scheduled_per_kind"] = m.scheduled_per_kind;
  doc["tz_offset_minutes"] = m.tz_offset_minutes;
  doc["salt"] = m.salt;
  ordered_json parts = ordered_json::array();
  for (const auto& p : m.participants) {
    ordered_json o;
    o["participant_id"] = p.participant_id;
    o["os"] = to_string(p.os);
    o["cluster_count"] = p.cluster_count;
    ordered_json centers = ordered_json::array();
    for (const auto& [lat, lon] : p.cluster_centers)
      centers.push_back(ordered_json{{"lat", lat}, {"lon", lon}});
    o["cluster_centers"] = std::move(centers);
    o["routine_amplitude_m"] = p.routine_amplitude_m;
    o["period_hours"] = p.period_hours;
    o["routine_adherence"] = p.routine_adherence;
    o["delivery_probability"] = p.delivery_probability;
    o["battery_c0"] = p.battery_c0;
    o["battery_k"] = p.battery_k;
    o["known_device_hashes"] = p.known_device_hashes;
    o["emitted"] = p.emitted;
    parts.push_back(std::move(o));
  }
  doc["participants"] = std::move(parts);
  return doc.dump(2);
}

}  // namespace mobsense
