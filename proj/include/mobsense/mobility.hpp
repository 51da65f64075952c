#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobsense/geo.hpp"
#include "mobsense/model.hpp"

namespace mobsense {

enum class FixState { stationary, transition, unlabeled };

struct LabeledFix {
  std::int64_t timestamp = 0;
  double latitude = 0;
  double longitude = 0;
  std::optional<double> speed_kmh;  // undefined for the first fix and over long gaps
  FixState state = FixState::unlabeled;
};

// speed of fix i = great-circle distance(i-1, i) / dt. Fixes whose preceding
// gap exceeds max_gap_minutes stay unlabeled; otherwise stationary iff
// speed < threshold. Throws std::invalid_argument on non-increasing input.
std::vector<LabeledFix> estimate_speeds(const std::vector<ScanEvent>& gps_events,
                                        double max_gap_minutes = 30.0,
                                        double speed_threshold_kmh = 1.0);

struct KMeansResult {
  std::vector<PlanePoint> centers;
  std::vector<int> assignment;
  double wcss = 0;
};

// k-means++ seeding, Lloyd iterations, `restarts` deterministic restarts keyed
// off `seed`; the lowest within-cluster sum of squares wins (earliest restart
// on ties). The OpenMP variant runs restarts concurrently and is bit-identical
// to the serial reference.
KMeansResult kmeans(const std::vector<PlanePoint>& pts, int k, int restarts,
                    std::uint64_t seed);
KMeansResult kmeans_serial(const std::vector<PlanePoint>& pts, int k, int restarts,
                           std::uint64_t seed);

struct ClusterOptions {
  double radius_threshold_m = 500.0;
  int k_max = 50;
  int restarts = 10;
  std::uint64_t seed = 0;
  bool parallel = true;
};

struct ClusterSet {
  int k = 0;
  std::vector<PlanePoint> centers;   // local-plane meters
  std::vector<int> assignment;       // one index per stationary fix
  std::vector<long long> counts;     // points per cluster
  double max_radius_m = 0;           // max distance of a point to its center
  bool radius_satisfied = false;     // false when K_max was hit first
  LocalProjection projection;        // converts centers back to lat/lon
};

// Grow K from 1 until the farthest point of every cluster lies within the
// radius bound (smallest such K wins). Stationary fixes are projected to a
// local tangent plane around their centroid first.
ClusterSet cluster_stationary(const std::vector<LabeledFix>& fixes,
                              const ClusterOptions& opt = {});

struct FrequencyGrid {
  std::vector<double> cycles_per_hour;
};

// Periods from min_period up to 2x the span, frequency spacing
// 1 / (oversampling * span).
FrequencyGrid spectral_grid(double span_hours, double min_period_hours = 2.0,
                            double oversampling = 4.0);

struct Spectrum {
  std::vector<double> energy;  // normalized periodogram, one value per grid frequency
  bool degenerate = false;     // zero-variance input; energies all zero
};

// Classical normalized Lomb-Scargle periodogram (variance-normalized). On a
// regular grid it matches |DFT of the centered series|^2 / (N * variance) at
// the Fourier frequencies. Times in hours, frequencies in cycles/hour.
Spectrum lomb_scargle(const std::vector<double>& t_hours,
                      const std::vector<double>& values, const FrequencyGrid& grid);
// Serial reference implementation; kept for testing and benchmarking.
Spectrum lomb_scargle_serial(const std::vector<double>& t_hours,
                             const std::vector<double>& values,
                             const FrequencyGrid& grid);

struct CircadianOptions {
  double band_halfwidth_hours = 0.5;  // the 24-hour bin is periods in 24 +- this
  double min_span_hours = 24.0;
  double min_period_hours = 2.0;
  double oversampling = 4.0;
  bool stationary_only = false;  // default spectrum is of all fixes
  double max_gap_minutes = 30.0;
  bool parallel = true;
};

struct SpectralResult {
  FrequencyGrid grid;
  Spectrum longitude;
  Spectrum latitude;
  double e24_longitude = 0;
  double e24_latitude = 0;
  std::optional<double> circadian_movement;  // ln(E24_lon + E24_lat); absent when the sum is 0
  std::string note;                          // why absent, when absent
};

// Energy in the 24-hour frequency bin of the longitude and latitude series.
SpectralResult circadian_movement(const std::vector<ScanEvent>& gps_events,
                                  const CircadianOptions& opt = {});

}  // namespace mobsense
