#pragma once

#include <string>
#include <vector>

#include "mobsense/model.hpp"

namespace mobsense {

struct DischargeObservation {
  std::string device_id;
  int week = 0;
  double scan_rate = 0;       // scans/hour scheduled in that week
  double discharge_rate = 0;  // %/hour while discharging
  int n_intervals = 0;
  double hours = 0;           // total qualifying time
};

struct DischargeOptions {
  double max_gap_minutes = 30.0;
};

// One observation per schedule week. Consecutive samples where both are
// discharging and the level is non-increasing form qualifying intervals;
// rate = total drop / total elapsed hours. Weeks without qualifying signal
// are omitted.
std::vector<DischargeObservation> discharge_observations(
    const std::vector<ScanEvent>& battery_events, const StudySchedule& schedule,
    const std::string& device_id, const DischargeOptions& opt = {});

struct BatteryFit {
  double intercept = 0;  // c0: %/hour with no scanning
  double slope = 0;      // k: %/hour per scan/hour
  std::vector<double> weights;
  int iterations = 0;
  bool fallback_ols = false;  // bisquare weighting degenerated; plain LS kept
};

struct RobustFitOptions {
  double tuning = 4.685;  // bisquare cutoff in robust-scale units
  int max_iterations = 50;
  double weight_tol = 1e-6;
};

// Iteratively reweighted least squares of discharge rate on scan rate with
// Tukey's bisquare weights; scale = 1.4826 * median absolute deviation.
// Needs at least two distinct scan rates.
BatteryFit fit_battery_model(const std::vector<DischargeObservation>& obs,
                             const RobustFitOptions& opt = {});

// 100 / (c0 + k * scan_rate) hours. Throws std::domain_error when the fitted
// rate is not positive.
double predict_battery_life(const BatteryFit& fit, double scan_rate);

}  // namespace mobsense
