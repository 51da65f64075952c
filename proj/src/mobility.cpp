#include "mobsense/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mobsense/rng.hpp"

namespace mobsense {

std::vector<LabeledFix> estimate_speeds(const std::vector<ScanEvent>& gps_events,
                                        double max_gap_minutes, double speed_threshold_kmh) {
  std::vector<LabeledFix> out;
  out.reserve(gps_events.size());
  const LabeledFix* prev = nullptr;
  for (const auto& e : gps_events) {
    if (e.kind != ScanKind::gps) continue;
    const auto& g = std::get<GpsFix>(e.payload);
    LabeledFix f;
    f.timestamp = e.timestamp;
    f.latitude = g.latitude;
    f.longitude = g.longitude;
    if (prev) {
      if (e.timestamp <= prev->timestamp)
        throw std::invalid_argument("estimate_speeds: timestamps must be strictly increasing");
      const double dt_h = static_cast<double>(e.timestamp - prev->timestamp) / 3600.0;
      if (dt_h * 60.0 <= max_gap_minutes) {
        const double d_km = haversine_km(prev->latitude, prev->longitude, f.latitude, f.longitude);
        f.speed_kmh = d_km / dt_h;
        f.state = *f.speed_kmh < speed_threshold_kmh ? FixState::stationary : FixState::transition;
      }
    }
    out.push_back(f);
    prev = &out.back();
  }
  return out;
}

namespace {

double sq_dist(const PlanePoint& a, const PlanePoint& b) {
  const double dx = a.x_m - b.x_m, dy = a.y_m - b.y_m;
  return dx * dx + dy * dy;
}

// k-means++ seeding followed by Lloyd iterations; fully determined by rng.
KMeansResult lloyd_once(const std::vector<PlanePoint>& pts, int k, CounterRng rng) {
  const std::size_t n = pts.size();
  KMeansResult r;
  r.centers.reserve(static_cast<std::size_t>(k));

  // Seeding: first center uniform, the rest proportional to squared distance.
  std::vector<double> d2(n, std::numeric_limits<double>::max());
  r.centers.push_back(pts[rng.next_below(n)]);
  while (static_cast<int>(r.centers.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts[i], r.centers.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0) {
      const double target = rng.next_unit() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.next_below(n);  // all points coincide with a center
    }
    r.centers.push_back(pts[pick]);
  }

  r.assignment.assign(n, 0);
  std::vector<PlanePoint> sums(static_cast<std::size_t>(k));
  std::vector<long long> counts(static_cast<std::size_t>(k));
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(pts[i], r.centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(pts[i], r.centers[static_cast<std::size_t>(c)]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::fill(sums.begin(), sums.end(), PlanePoint{});
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[i]);
      sums[c].x_m += pts[i].x_m;
      sums[c].y_m += pts[i].y_m;
      ++counts[c];
    }
    for (int c = 0; c < k; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      if (counts[ci] > 0) {
        r.centers[ci] = {sums[ci].x_m / static_cast<double>(counts[ci]),
                         sums[ci].y_m / static_cast<double>(counts[ci])};
      } else {
        // Empty cluster: reseat it on the point farthest from its center.
        std::size_t far = 0;
        double fd = -1;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(pts[i], r.centers[static_cast<std::size_t>(r.assignment[i])]);
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        r.centers[ci] = pts[far];
        changed = true;
      }
    }
  }

  r.wcss = 0;
  for (std::size_t i = 0; i < n; ++i)
    r.wcss += sq_dist(pts[i], r.centers[static_cast<std::size_t>(r.assignment[i])]);
  return r;
}

KMeansResult kmeans_impl(const std::vector<PlanePoint>& pts, int k, int restarts,
                         std::uint64_t seed, bool parallel) {
  if (pts.empty()) throw std::invalid_argument("kmeans: empty point set");
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");
  k = std::min<int>(k, static_cast<int>(pts.size()));
  if (k == 1) {
    KMeansResult r;
    PlanePoint c{};
    for (const auto& p : pts) {
      c.x_m += p.x_m;
      c.y_m += p.y_m;
    }
    c.x_m /= static_cast<double>(pts.size());
    c.y_m /= static_cast<double>(pts.size());
    r.centers = {c};
    r.assignment.assign(pts.size(), 0);
    r.wcss = 0;
    for (const auto& p : pts) r.wcss += sq_dist(p, c);
    return r;
  }

  std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng{seed, 0x6b6d65616e73ULL /*stream*/, static_cast<std::uint64_t>(r), 0};
    rng.substream = rng.substream * 1000003ULL + static_cast<std::uint64_t>(k);
    runs[static_cast<std::size_t>(r)] = lloyd_once(pts, k, rng);
  }
  // Earliest restart wins ties, so serial and parallel agree bit for bit.
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].wcss < runs[best].wcss) best = r;
  return runs[best];
}

}  // namespace

KMeansResult kmeans(const std::vector<PlanePoint>& pts, int k, int restarts, std::uint64_t seed) {
  return kmeans_impl(pts, k, restarts, seed, true);
}

KMeansResult kmeans_serial(const std::vector<PlanePoint>& pts, int k, int restarts,
                           std::uint64_t seed) {
  return kmeans_impl(pts, k, restarts, seed, false);
}

ClusterSet cluster_stationary(const std::vector<LabeledFix>& fixes, const ClusterOptions& opt) {
  std::vector<PlanePoint> pts;
  double lat0 = 0, lon0 = 0;
  std::size_t n_stationary = 0;
  for (const auto& f : fixes) {
    if (f.state != FixState::stationary) continue;
    lat0 += f.latitude;
    lon0 += f.longitude;
    ++n_stationary;
  }
  if (n_stationary == 0)
    throw std::invalid_argument("cluster_stationary: no stationary fixes");
  lat0 /= static_cast<double>(n_stationary);
  lon0 /= static_cast<double>(n_stationary);

  ClusterSet cs;
  cs.projection = {lat0, lon0};
  pts.reserve(n_stationary);
  for (const auto& f : fixes)
    if (f.state == FixState::stationary) pts.push_back(cs.projection.to_plane(f.latitude, f.longitude));

  const int k_cap = std::min<int>(opt.k_max, static_cast<int>(pts.size()));
  for (int k = 1; k <= k_cap; ++k) {
    KMeansResult run = kmeans_impl(pts, k, opt.restarts, opt.seed, opt.parallel);
    double max_r = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      max_r = std::max(max_r,
                       plane_distance_m(pts[i], run.centers[static_cast<std::size_t>(run.assignment[i])]));
    cs.k = static_cast<int>(run.centers.size());
    cs.centers = std::move(run.centers);
    cs.assignment = std::move(run.assignment);
    cs.max_radius_m = max_r;
    cs.radius_satisfied = max_r < opt.radius_threshold_m;
    if (cs.radius_satisfied) break;
  }
  cs.counts.assign(static_cast<std::size_t>(cs.k), 0);
  for (int a : cs.assignment) ++cs.counts[static_cast<std::size_t>(a)];
  return cs;
}

FrequencyGrid spectral_grid(double span_hours, double min_period_hours, double oversampling) {
  FrequencyGrid g;
  if (span_hours <= 0 || min_period_hours <= 0 || oversampling <= 0) return g;
  const double f_min = 1.0 / (2.0 * span_hours);
  const double f_max = 1.0 / min_period_hours;
  const double df = 1.0 / (oversampling * span_hours);
  for (double f = f_min; f <= f_max + 1e-12; f += df) g.cycles_per_hour.push_back(f);
  return g;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

Spectrum lomb_impl(const std::vector<double>& t_hours, const std::vector<double>& values,
                   const FrequencyGrid& grid, bool parallel) {
  if (t_hours.size() != values.size())
    throw std::invalid_argument("lomb_scargle: time/value length mismatch");
  const std::size_t n = t_hours.size();
  if (n < 3) throw std::invalid_argument("lomb_scargle: need at least 3 samples");

  Spectrum sp;
  sp.energy.assign(grid.cycles_per_hour.size(), 0.0);

  // A constant series has no spectrum; catch it before mean subtraction can
  // leave rounding dust that would masquerade as variance.
  bool constant = true;
  for (std::size_t i = 1; i < n && constant; ++i) constant = values[i] == values[0];
  if (constant) {
    sp.degenerate = true;
    return sp;
  }

  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> yc(n);
  double var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    yc[i] = values[i] - mean;
    var += yc[i] * yc[i];
  }
  var /= static_cast<double>(n - 1);
  if (var <= 0) {
    sp.degenerate = true;
    return sp;
  }

  const auto nf = static_cast<std::int64_t>(grid.cycles_per_hour.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t j = 0; j < nf; ++j) {
    const double w = kTwoPi * grid.cycles_per_hour[static_cast<std::size_t>(j)];
    double s2 = 0, c2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s2 += std::sin(2.0 * w * t_hours[i]);
      c2 += std::cos(2.0 * w * t_hours[i]);
    }
    const double tau = std::atan2(s2, c2) / (2.0 * w);
    double cs = 0, ss = 0, cc = 0, s_s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double arg = w * (t_hours[i] - tau);
      const double c = std::cos(arg);
      const double s = std::sin(arg);
      cs += yc[i] * c;
      ss += yc[i] * s;
      cc += c * c;
      s_s += s * s;
    }
    const double eps = 1e-12 * static_cast<double>(n);
    double p = 0;
    if (cc > eps) p += cs * cs / cc;
    if (s_s > eps) p += ss * ss / s_s;
    sp.energy[static_cast<std::size_t>(j)] = p / (2.0 * var);
  }
  return sp;
}

}  // namespace

Spectrum lomb_scargle(const std::vector<double>& t_hours, const std::vector<double>& values,
                      const FrequencyGrid& grid) {
  return lomb_impl(t_hours, values, grid, true);
}

Spectrum lomb_scargle_serial(const std::vector<double>& t_hours,
                             const std::vector<double>& values, const FrequencyGrid& grid) {
  return lomb_impl(t_hours, values, grid, false);
}

SpectralResult circadian_movement(const std::vector<ScanEvent>& gps_events,
                                  const CircadianOptions& opt) {
  SpectralResult res;

  std::vector<double> t_hours, lon, lat;
  if (opt.stationary_only) {
    const auto labeled = estimate_speeds(gps_events, opt.max_gap_minutes);
    for (const auto& f : labeled) {
      if (f.state != FixState::stationary) continue;
      t_hours.push_back(static_cast<double>(f.timestamp) / 3600.0);
      lon.push_back(f.longitude);
      lat.push_back(f.latitude);
    }
  } else {
    for (const auto& e : gps_events) {
      if (e.kind != ScanKind::gps) continue;
      const auto& g = std::get<GpsFix>(e.payload);
      t_hours.push_back(static_cast<double>(e.timestamp) / 3600.0);
      lon.push_back(g.longitude);
      lat.push_back(g.latitude);
    }
  }

  if (t_hours.size() < 3) {
    res.note = "fewer than 3 usable fixes";
    return res;
  }
  const double span = t_hours.back() - t_hours.front();
  if (span < opt.min_span_hours) {
    res.note = "window spans less than 24 hours";
    return res;
  }
  const double t0 = t_hours.front();
  for (double& t : t_hours) t -= t0;

  res.grid = spectral_grid(span, opt.min_period_hours, opt.oversampling);
  res.longitude = opt.parallel ? lomb_scargle(t_hours, lon, res.grid)
                               : lomb_scargle_serial(t_hours, lon, res.grid);
  res.latitude = opt.parallel ? lomb_scargle(t_hours, lat, res.grid)
                              : lomb_scargle_serial(t_hours, lat, res.grid);

  const double p_lo = 24.0 - opt.band_halfwidth_hours;
  const double p_hi = 24.0 + opt.band_halfwidth_hours;
  for (std::size_t j = 0; j < res.grid.cycles_per_hour.size(); ++j) {
    const double period = 1.0 / res.grid.cycles_per_hour[j];
    if (period < p_lo || period > p_hi) continue;
    res.e24_longitude += res.longitude.energy[j];
    res.e24_latitude += res.latitude.energy[j];
  }
  const double total = res.e24_longitude + res.e24_latitude;
  if (total > 0)
    res.circadian_movement = std::log(total);
  else
    res.note = "no energy in the 24-hour band (constant location)";
  return res;
}

}  // namespace mobsense
