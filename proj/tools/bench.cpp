// Compares the OpenMP kernels against their serial reference implementations.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mobsense/mobility.hpp"
#include "mobsense/rng.hpp"

using namespace mobsense;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void bench_lomb(std::size_t n_samples, double span_hours) {
  CounterRng rng{7, 1, 1, 0};
  std::vector<double> t(n_samples), y(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    t[i] = span_hours * static_cast<double>(i) / static_cast<double>(n_samples);
    y[i] = std::sin(2 * 3.14159265358979 * t[i] / 24.0) + 0.3 * rng.next_normal();
  }
  const auto grid = spectral_grid(span_hours);

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = lomb_scargle_serial(t, y, grid);
  const double ms_serial = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = lomb_scargle(t, y, grid);
  const double ms_parallel = ms_since(t0);

  double max_diff = 0;
  for (std::size_t i = 0; i < serial.energy.size(); ++i)
    max_diff = std::max(max_diff, std::fabs(serial.energy[i] - parallel.energy[i]));

  std::printf("lomb_scargle   n=%-6zu grid=%-5zu serial %8.2f ms  omp %8.2f ms  speedup %.2fx  max|diff| %g\n",
              n_samples, grid.cycles_per_hour.size(), ms_serial, ms_parallel,
              ms_serial / ms_parallel, max_diff);
}

void bench_kmeans(std::size_t n_points, int k, int restarts) {
  CounterRng rng{13, 2, 2, 0};
  std::vector<PlanePoint> pts(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const int c = static_cast<int>(i) % k;
    pts[i] = {5000.0 * c + 40.0 * rng.next_normal(), 3000.0 * (c % 3) + 40.0 * rng.next_normal()};
  }

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = kmeans_serial(pts, k, restarts, 99);
  const double ms_serial = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = kmeans(pts, k, restarts, 99);
  const double ms_parallel = ms_since(t0);

  std::printf("kmeans         n=%-6zu k=%-3d    serial %8.2f ms  omp %8.2f ms  speedup %.2fx  wcss equal %s\n",
              n_points, k, ms_serial, ms_parallel, ms_serial / ms_parallel,
              serial.wcss == parallel.wcss ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run serially\n");
#endif
  bench_lomb(2016, 168);    // one week at 5-minute sampling
  bench_lomb(10080, 168);   // one week at 1-minute sampling
  bench_kmeans(2000, 8, 10);
  bench_kmeans(20000, 12, 10);
  return 0;
}
