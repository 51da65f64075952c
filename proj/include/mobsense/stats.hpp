#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace mobsense {

// n subjects x k conditions, no missing cells (listwise deletion happens
// before entry). Requires n >= 2 and k >= 2.
struct RepeatedMeasures {
  std::vector<std::vector<double>> rows;

  std::size_t n() const { return rows.size(); }
  std::size_t k() const { return rows.empty() ? 0 : rows.front().size(); }
};

struct AlphaResult {
  double alpha = 0;
  std::optional<std::pair<double, double>> ci95;  // Feldt's F interval
};

// alpha = k/(k-1) * (1 - sum_i var(condition i) / var(row sums)), sample
// variances. Throws std::domain_error on zero total variance.
AlphaResult cronbach_alpha(const RepeatedMeasures& m);

enum class SphericityCorrection { none, greenhouse_geisser };

struct AnovaResult {
  double F = 0;
  double df1 = 0;
  double df2 = 0;
  double p = 1;
  double epsilon = 1;  // Greenhouse-Geisser estimate, in [1/(k-1), 1]
};

// Classical within-subjects decomposition; the Greenhouse-Geisser epsilon
// from the double-centered covariance matrix scales both df.
AnovaResult rm_anova(const RepeatedMeasures& m,
                     SphericityCorrection correction = SphericityCorrection::greenhouse_geisser);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1;
  double cohen_d = 0;
};

TTestResult paired_t(const std::vector<double>& x, const std::vector<double>& y);
TTestResult two_sample_t(const std::vector<double>& x, const std::vector<double>& y,
                         bool welch = false);

// Distribution tails (regularized incomplete beta underneath).
double f_tail_p(double F, double df1, double df2);
double t_two_sided_p(double t, double df);
double f_quantile(double p, double df1, double df2);

double sample_mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);  // n-1 denominator
double sample_sd(const std::vector<double>& x);

}  // namespace mobsense
