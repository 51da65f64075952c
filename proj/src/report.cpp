#include "mobsense/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "mobsense/timeutil.hpp"

namespace mobsense {

using nlohmann::ordered_json;

double round_sig(double x, int digits) {
  if (x == 0 || !std::isfinite(x)) return x;
  const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(x)))));
  return std::round(x * mag) / mag;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ParticipantFeatures analyze_one(const std::string& pid, std::vector<ScanEvent> events,
                                const AnalysisOptions& opt) {
  // Canonical order, duplicate (kind, timestamp) records collapsed to the first.
  std::stable_sort(events.begin(), events.end(), [](const ScanEvent& a, const ScanEvent& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  std::vector<ScanEvent> dedup;
  dedup.reserve(events.size());
  for (auto& e : events) {
    if (!dedup.empty() && dedup.back().kind == e.kind && dedup.back().timestamp == e.timestamp)
      continue;
    dedup.push_back(std::move(e));
  }

  ParticipantFeatures f;
  f.participant_id = pid;
  if (!dedup.empty()) {
    f.os = dedup.front().device_os;
    f.device_model = dedup.front().device_model;
  }

  f.bluetooth_completeness = completeness_pct(dedup, opt.schedule, ScanKind::bluetooth);
  f.gps_completeness = completeness_pct(dedup, opt.schedule, ScanKind::gps);
  f.battery_completeness = completeness_pct(dedup, opt.schedule, ScanKind::battery);
  f.completeness_pct = participant_completeness(dedup, opt.schedule, opt.completeness_mode);

  const auto partition = classify_devices(dedup, opt.min_days_known, opt.tz_offset_minutes);
  f.social = social_profile(dedup, partition, opt.tz_offset_minutes, opt.profile_denominator,
                            &opt.schedule);

  std::vector<ScanEvent> gps;
  for (const auto& e : dedup)
    if (e.kind == ScanKind::gps) gps.push_back(e);

  if (!gps.empty()) {
    const auto labeled = estimate_speeds(gps, opt.circadian.max_gap_minutes);
    const bool any_stationary =
        std::any_of(labeled.begin(), labeled.end(),
                    [](const LabeledFix& x) { return x.state == FixState::stationary; });
    if (any_stationary) f.clusters = cluster_stationary(labeled, opt.cluster);
  }

  for (std::size_t w = 0; w < opt.schedule.weeks.size(); ++w) {
    const auto& week = opt.schedule.weeks[w];
    std::vector<ScanEvent> in_week;
    for (const auto& e : gps)
      if (e.timestamp >= week.start && e.timestamp < week.end) in_week.push_back(e);
    WeekCircadian wc;
    wc.week = static_cast<int>(w);
    wc.interval_minutes = week.interval_minutes;
    auto res = circadian_movement(in_week, opt.circadian);
    wc.circadian_movement = res.circadian_movement;
    f.circadian_by_week.push_back(wc);
  }

  f.battery_observations = discharge_observations(dedup, opt.schedule, pid, opt.discharge);
  return f;
}

}  // namespace

StudyReport analyze(const std::vector<ScanEvent>& events, const AnalysisOptions& opt) {
  if (auto err = validate_schedule(opt.schedule))
    throw std::invalid_argument("analyze: " + *err);

  std::map<std::string, std::vector<ScanEvent>> by_participant;
  for (const auto& e : events) by_participant[e.participant_id].push_back(e);

  std::vector<std::string> ids;
  std::vector<std::vector<ScanEvent>> groups;
  ids.reserve(by_participant.size());
  for (auto& [id, evts] : by_participant) {
    ids.push_back(id);
    groups.push_back(std::move(evts));
  }

  StudyReport report;
  report.participants.resize(ids.size());
  const auto n = static_cast<std::int64_t>(ids.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (std::int64_t i = 0; i < n; ++i)
    report.participants[static_cast<std::size_t>(i)] =
        analyze_one(ids[static_cast<std::size_t>(i)], std::move(groups[static_cast<std::size_t>(i)]), opt);

  // Group-level: completeness by OS.
  std::vector<std::pair<DeviceOs, double>> per_os;
  for (const auto& p : report.participants) per_os.emplace_back(p.os, p.completeness_pct);
  report.os_completeness = completeness_by_os(per_os);

  // Group-level: battery fit across devices and weeks.
  std::vector<DischargeObservation> all_obs;
  for (const auto& p : report.participants)
    all_obs.insert(all_obs.end(), p.battery_observations.begin(), p.battery_observations.end());
  try {
    BatterySummary bs;
    bs.fit = fit_battery_model(all_obs);
    for (double rate : {0.0, 7.5, 12.0, 15.0, 20.0})
      bs.lives.emplace_back(rate, predict_battery_life(bs.fit, rate));
    report.battery = std::move(bs);
  } catch (const std::exception&) {
    // not enough discharge signal; battery section stays absent
  }

  // Group-level: circadian movement reliability across weeks.
  RepeatedMeasures m;
  for (const auto& p : report.participants) {
    std::vector<double> row;
    for (const auto& wc : p.circadian_by_week) {
      if (!wc.circadian_movement) break;
      row.push_back(*wc.circadian_movement);
    }
    if (row.size() == opt.schedule.weeks.size() && !row.empty()) m.rows.push_back(std::move(row));
  }
  report.circadian_complete_rows = static_cast<int>(m.rows.size());
  if (m.rows.size() >= 2 && opt.schedule.weeks.size() >= 2) {
    try {
      report.circadian_alpha = cronbach_alpha(m);
      report.circadian_anova = rm_anova(m, SphericityCorrection::greenhouse_geisser);
    } catch (const std::exception& e) {
      report.circadian_stats_note = e.what();
    }
  } else {
    report.circadian_stats_note = "fewer than 2 participants with circadian movement in every week";
  }
  return report;
}

namespace {

ordered_json completeness_json(const CompletenessResult& c) {
  return ordered_json{{"scheduled", c.scheduled},
                      {"collected", c.collected},
                      {"out_of_window", c.out_of_window},
                      {"pct", round_sig(c.pct)}};
}

ordered_json group_json(const GroupCompleteness& g) {
  ordered_json o{{"n", g.n}, {"mean_pct", round_sig(g.mean)}};
  if (g.sd)
    o["sd_pct"] = round_sig(*g.sd);
  else
    o["sd_pct"] = nullptr;
  return o;
}

ordered_json ttest_json(const TTestResult& t) {
  return ordered_json{{"t", round_sig(t.t)},
                      {"df", round_sig(t.df)},
                      {"p", round_sig(t.p)},
                      {"cohen_d", round_sig(t.cohen_d)}};
}

}  // namespace

ordered_json report_to_json(const StudyReport& report, const AnalysisOptions& opt) {
  ordered_json doc;
  doc["tool"] = "mobsense";
  ordered_json weeks = ordered_json::array();
  for (const auto& w : opt.schedule.weeks)
    weeks.push_back(ordered_json{{"start", format_iso8601_utc(w.start)},
                                 {"end", format_iso8601_utc(w.end)},
                                 {"interval_minutes", w.interval_minutes}});
  doc["schedule"] = ordered_json{{"weeks", std::move(weeks)},
                                 {"scheduled_count", scheduled_count(opt.schedule)}};
  doc["options"] = ordered_json{
      {"tz_offset", format_tz_offset(opt.tz_offset_minutes)},
      {"completeness_mode",
       opt.completeness_mode == CompletenessMode::mean_of_kinds ? "mean_of_kinds" : "scan_cycles"},
      {"min_days_known", opt.min_days_known},
      {"cluster_radius_threshold_m", opt.cluster.radius_threshold_m},
      {"cluster_seed", opt.cluster.seed},
      {"circadian_band_halfwidth_hours", opt.circadian.band_halfwidth_hours}};

  ordered_json parts = ordered_json::array();
  for (const auto& p : report.participants) {
    ordered_json o;
    o["participant_id"] = p.participant_id;
    o["device_os"] = to_string(p.os);
    o["device_model"] = p.device_model ? ordered_json(*p.device_model) : ordered_json(nullptr);
    o["completeness"] = ordered_json{{"bluetooth", completeness_json(p.bluetooth_completeness)},
                                     {"gps", completeness_json(p.gps_completeness)},
                                     {"battery", completeness_json(p.battery_completeness)},
                                     {"participant_pct", round_sig(p.completeness_pct)}};
    ordered_json hours = ordered_json::array();
    for (const auto& row : p.social.rows)
      hours.push_back(ordered_json{{"hour", row.hour},
                                   {"mean_known", round_sig(row.mean_known)},
                                   {"mean_unknown", round_sig(row.mean_unknown)}});
    o["social_profile"] =
        ordered_json{{"denominator_days", p.social.denominator_days}, {"hours", std::move(hours)}};

    ordered_json mobility;
    if (p.clusters) {
      ordered_json centers = ordered_json::array();
      for (int c = 0; c < p.clusters->k; ++c) {
        double lat, lon;
        p.clusters->projection.to_geo(p.clusters->centers[static_cast<std::size_t>(c)], lat, lon);
        centers.push_back(ordered_json{{"cluster_id", c},
                                       {"center_lat", round_sig(lat, 9)},
                                       {"center_lon", round_sig(lon, 9)},
                                       {"n_points", p.clusters->counts[static_cast<std::size_t>(c)]}});
      }
      mobility["clusters"] = ordered_json{{"k", p.clusters->k},
                                          {"max_radius_m", round_sig(p.clusters->max_radius_m)},
                                          {"radius_satisfied", p.clusters->radius_satisfied},
                                          {"centers", std::move(centers)}};
    } else {
      mobility["clusters"] = nullptr;
    }
    ordered_json cm = ordered_json::array();
    for (const auto& wc : p.circadian_by_week)
      cm.push_back(ordered_json{
          {"week", wc.week},
          {"interval_minutes", wc.interval_minutes},
          {"circadian_movement",
           wc.circadian_movement ? ordered_json(round_sig(*wc.circadian_movement)) : ordered_json(nullptr)}});
    mobility["circadian_by_week"] = std::move(cm);
    o["mobility"] = std::move(mobility);

    ordered_json obs = ordered_json::array();
    for (const auto& b : p.battery_observations)
      obs.push_back(ordered_json{{"week", b.week},
                                 {"scan_rate", round_sig(b.scan_rate)},
                                 {"discharge_rate_pct_per_hour", round_sig(b.discharge_rate)},
                                 {"n_intervals", b.n_intervals},
                                 {"hours", round_sig(b.hours)}});
    o["battery_observations"] = std::move(obs);
    parts.push_back(std::move(o));
  }
  doc["participants"] = std::move(parts);

  ordered_json group;
  group["completeness_by_os"] =
      ordered_json{{"android", group_json(report.os_completeness.android)},
                   {"ios", group_json(report.os_completeness.ios)},
                   {"t_test", report.os_completeness.t ? ttest_json(*report.os_completeness.t)
                                                       : ordered_json(nullptr)}};
  if (report.battery) {
    ordered_json lives = ordered_json::array();
    for (const auto& [rate, hours] : report.battery->lives)
      lives.push_back(ordered_json{{"scan_rate", rate}, {"hours", round_sig(hours)}});
    group["battery"] =
        ordered_json{{"fit", ordered_json{{"intercept_pct_per_hour", round_sig(report.battery->fit.intercept)},
                                          {"slope_pct_per_hour_per_scan_rate", round_sig(report.battery->fit.slope)},
                                          {"iterations", report.battery->fit.iterations},
                                          {"fallback_ols", report.battery->fit.fallback_ols}}},
                     {"lives_hours", std::move(lives)}};
  } else {
    group["battery"] = nullptr;
  }
  ordered_json rel;
  rel["n_complete"] = report.circadian_complete_rows;
  if (report.circadian_alpha) {
    rel["alpha"] = round_sig(report.circadian_alpha->alpha);
    if (report.circadian_alpha->ci95)
      rel["alpha_ci95"] = ordered_json::array({round_sig(report.circadian_alpha->ci95->first),
                                               round_sig(report.circadian_alpha->ci95->second)});
    else
      rel["alpha_ci95"] = nullptr;
  } else {
    rel["alpha"] = nullptr;
    rel["alpha_ci95"] = nullptr;
  }
  if (report.circadian_anova) {
    rel["anova"] = ordered_json{{"F", round_sig(report.circadian_anova->F)},
                                {"df1", round_sig(report.circadian_anova->df1)},
                                {"df2", round_sig(report.circadian_anova->df2)},
                                {"p", round_sig(report.circadian_anova->p)},
                                {"epsilon", round_sig(report.circadian_anova->epsilon)}};
  } else {
    rel["anova"] = nullptr;
  }
  if (!report.circadian_stats_note.empty()) rel["note"] = report.circadian_stats_note;
  group["circadian_reliability"] = std::move(rel);
  doc["group"] = std::move(group);
  return doc;
}

void write_completeness_csv(std::ostream& out, const StudyReport& r) {
  out << "participant_id,os,model,scheduled,collected,completeness_pct\n";
  for (const auto& p : r.participants) {
    const double collected =
        (static_cast<double>(p.bluetooth_completeness.collected) +
         static_cast<double>(p.gps_completeness.collected)) /
        2.0;
    out << p.participant_id << ',' << to_string(p.os) << ','
        << (p.device_model ? *p.device_model : "") << ',' << p.bluetooth_completeness.scheduled
        << ',' << fmt(collected) << ',' << fmt(round_sig(p.completeness_pct)) << '\n';
  }
}

void write_social_csv(std::ostream& out, const StudyReport& r) {
  out << "participant_id,hour,mean_known,mean_unknown\n";
  for (const auto& p : r.participants)
    for (const auto& row : p.social.rows)
      out << p.participant_id << ',' << row.hour << ',' << fmt(round_sig(row.mean_known)) << ','
          << fmt(round_sig(row.mean_unknown)) << '\n';
}

void write_clusters_csv(std::ostream& out, const StudyReport& r) {
  out << "participant_id,cluster_id,center_lat,center_lon,n_points\n";
  for (const auto& p : r.participants) {
    if (!p.clusters) continue;
    for (int c = 0; c < p.clusters->k; ++c) {
      double lat, lon;
      p.clusters->projection.to_geo(p.clusters->centers[static_cast<std::size_t>(c)], lat, lon);
      char latbuf[32], lonbuf[32];
      std::snprintf(latbuf, sizeof(latbuf), "%.9g", round_sig(lat, 9));
      std::snprintf(lonbuf, sizeof(lonbuf), "%.9g", round_sig(lon, 9));
      out << p.participant_id << ',' << c << ',' << latbuf << ',' << lonbuf << ','
          << p.clusters->counts[static_cast<std::size_t>(c)] << '\n';
    }
  }
}

void write_circadian_csv(std::ostream& out, const StudyReport& r) {
  out << "participant_id,week,interval_minutes,circadian_movement\n";
  for (const auto& p : r.participants)
    for (const auto& wc : p.circadian_by_week) {
      out << p.participant_id << ',' << wc.week << ',' << fmt(wc.interval_minutes) << ',';
      if (wc.circadian_movement) out << fmt(round_sig(*wc.circadian_movement));
      out << '\n';
    }
}

void write_battery_observations_csv(std::ostream& out, const StudyReport& r) {
  out << "participant_id,week,scan_rate,discharge_rate_pct_per_hour,n_intervals,hours\n";
  for (const auto& p : r.participants)
    for (const auto& b : p.battery_observations)
      out << p.participant_id << ',' << b.week << ',' << fmt(b.scan_rate) << ','
          << fmt(round_sig(b.discharge_rate)) << ',' << b.n_intervals << ','
          << fmt(round_sig(b.hours)) << '\n';
}

void write_battery_lives_csv(std::ostream& out, const StudyReport& r) {
  out << "scan_rate,predicted_life_hours\n";
  if (!r.battery) return;
  for (const auto& [rate, hours] : r.battery->lives)
    out << fmt(rate) << ',' << fmt(round_sig(hours)) << '\n';
}

}  // namespace mobsense
