#include "mobsense/battery.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mobsense {

std::vector<DischargeObservation> discharge_observations(
    const std::vector<ScanEvent>& battery_events, const StudySchedule& schedule,
    const std::string& device_id, const DischargeOptions& opt) {
  struct WeekAccum {
    double drop = 0;
    double hours = 0;
    int intervals = 0;
  };
  std::vector<WeekAccum> acc(schedule.weeks.size());

  const BatterySample* prev = nullptr;
  std::int64_t prev_ts = 0;
  for (const auto& e : battery_events) {
    if (e.kind != ScanKind::battery) continue;
    const auto& b = std::get<BatterySample>(e.payload);
    if (prev && e.timestamp <= prev_ts)
      throw std::invalid_argument("discharge_observations: battery events must be time-ordered");
    if (prev) {
      const double gap_min = static_cast<double>(e.timestamp - prev_ts) / 60.0;
      const auto week = schedule.week_of(prev_ts);
      const bool same_week = week && schedule.week_of(e.timestamp) == week;
      if (same_week && !prev->charging && !b.charging && gap_min <= opt.max_gap_minutes &&
          b.level_pct <= prev->level_pct) {
        auto& w = acc[static_cast<std::size_t>(*week)];
        w.drop += prev->level_pct - b.level_pct;
        w.hours += gap_min / 60.0;
        ++w.intervals;
      }
    }
    prev = &b;
    prev_ts = e.timestamp;
  }

  std::vector<DischargeObservation> out;
  for (std::size_t w = 0; w < acc.size(); ++w) {
    if (acc[w].intervals == 0 || acc[w].hours <= 0) continue;
    const double rate = acc[w].drop / acc[w].hours;
    if (rate <= 0) continue;  // a flat week carries no discharge signal
    DischargeObservation obs;
    obs.device_id = device_id;
    obs.week = static_cast<int>(w);
    obs.scan_rate = schedule.weeks[w].scans_per_hour();
    obs.discharge_rate = rate;
    obs.n_intervals = acc[w].intervals;
    obs.hours = acc[w].hours;
    out.push_back(obs);
  }
  return out;
}

namespace {

struct Line {
  double intercept = 0;
  double slope = 0;
};

// Weighted least squares of y on x; returns false when the design is singular.
bool wls(const std::vector<double>& x, const std::vector<double>& y,
         const std::vector<double>& w, Line& out) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (sw <= 0 || std::fabs(det) < 1e-12 * std::max(1.0, sw * sxx)) return false;
  out.slope = (sw * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / sw;
  return true;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BatteryFit fit_battery_model(const std::vector<DischargeObservation>& obs,
                             const RobustFitOptions& opt) {
  std::set<double> rates;
  for (const auto& o : obs) rates.insert(o.scan_rate);
  if (rates.size() < 2)
    throw std::invalid_argument("fit_battery_model: need at least two distinct scan rates");

  const std::size_t n = obs.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = obs[i].scan_rate;
    y[i] = obs[i].discharge_rate;
  }

  BatteryFit fit;
  std::vector<double> w(n, 1.0);
  Line line;
  if (!wls(x, y, w, line)) throw std::invalid_argument("fit_battery_model: singular design");

  std::vector<double> resid(n), wnew(n);
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    fit.iterations = iter;
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - (line.intercept + line.slope * x[i]);

    // Robust scale from the median absolute residual (the intercept keeps the
    // fit centered). Centering the deviations instead can zero every weight
    // when a contaminated start leaves all clean residuals offset from zero.
    std::vector<double> absdev(n);
    for (std::size_t i = 0; i < n; ++i) absdev[i] = std::fabs(resid[i]);
    const double scale = 1.4826 * median(absdev);

    if (scale <= 1e-12) {
      // Residual spread is numerically zero: the current line already fits.
      break;
    }
    const double cutoff = opt.tuning * scale;
    double max_delta = 0, wsum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = resid[i] / cutoff;
      wnew[i] = std::fabs(u) < 1.0 ? (1 - u * u) * (1 - u * u) : 0.0;
      max_delta = std::max(max_delta, std::fabs(wnew[i] - w[i]));
      wsum += wnew[i];
    }
    if (wsum <= 0) {
      // Everything got rejected; keep the ordinary least squares answer.
      fit.fallback_ols = true;
      std::fill(w.begin(), w.end(), 1.0);
      wls(x, y, w, line);
      break;
    }
    w = wnew;
    Line next;
    if (!wls(x, y, w, next)) {
      fit.fallback_ols = true;
      std::fill(w.begin(), w.end(), 1.0);
      wls(x, y, w, line);
      break;
    }
    line = next;
    if (max_delta < opt.weight_tol) break;
  }

  fit.intercept = line.intercept;
  fit.slope = line.slope;
  fit.weights = std::move(w);
  return fit;
}

double predict_battery_life(const BatteryFit& fit, double scan_rate) {
  const double rate = fit.intercept + fit.slope * scan_rate;
  if (rate <= 0)
    throw std::domain_error("predict_battery_life: fitted discharge rate is not positive");
  return 100.0 / rate;
}

}  // namespace mobsense
