#include "mobsense/stats.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <stdexcept>

namespace mobsense {

double sample_mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::domain_error("sample_variance needs n >= 2");
  const double m = sample_mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double sample_sd(const std::vector<double>& x) { return std::sqrt(sample_variance(x)); }

double f_tail_p(double F, double df1, double df2) {
  if (F <= 0) return 1.0;
  boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, F));
}

double t_two_sided_p(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double f_quantile(double p, double df1, double df2) {
  boost::math::fisher_f dist(df1, df2);
  return boost::math::quantile(dist, p);
}

namespace {

void check_matrix(const RepeatedMeasures& m) {
  if (m.n() < 2 || m.k() < 2)
    throw std::invalid_argument("repeated measures need n >= 2 subjects and k >= 2 conditions");
  for (const auto& row : m.rows)
    if (row.size() != m.k())
      throw std::invalid_argument("repeated measures rows must have equal length");
}

}  // namespace

AlphaResult cronbach_alpha(const RepeatedMeasures& m) {
  check_matrix(m);
  const std::size_t n = m.n(), k = m.k();
  std::vector<double> totals(n, 0.0);
  double sum_item_var = 0;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = m.rows[i][j];
    sum_item_var += sample_variance(col);
    for (std::size_t i = 0; i < n; ++i) totals[i] += col[i];
  }
  const double total_var = sample_variance(totals);
  if (total_var <= 0) throw std::domain_error("cronbach_alpha: zero total variance");
  AlphaResult r;
  const double kd = static_cast<double>(k);
  r.alpha = kd / (kd - 1.0) * (1.0 - sum_item_var / total_var);

  // Feldt's interval: (1 - alpha) / (1 - alpha_hat) ~ F(n-1, (n-1)(k-1)).
  const double df1 = static_cast<double>(n - 1);
  const double df2 = static_cast<double>((n - 1) * (k - 1));
  const double one_minus = 1.0 - r.alpha;
  if (one_minus > 0) {
    r.ci95 = {1.0 - one_minus * f_quantile(0.975, df1, df2),
              1.0 - one_minus * f_quantile(0.025, df1, df2)};
  }
  return r;
}

AnovaResult rm_anova(const RepeatedMeasures& m, SphericityCorrection correction) {
  check_matrix(m);
  const std::size_t n = m.n(), k = m.k();
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);

  double grand = 0;
  for (const auto& row : m.rows)
    for (double v : row) grand += v;
  grand /= nd * kd;

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += m.rows[i][j];
      col_mean[j] += m.rows[i][j];
    }
    row_mean[i] /= kd;
  }
  for (std::size_t j = 0; j < k; ++j) col_mean[j] /= nd;

  double ss_total = 0, ss_subj = 0, ss_cond = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) ss_total += (m.rows[i][j] - grand) * (m.rows[i][j] - grand);
  for (std::size_t i = 0; i < n; ++i) ss_subj += kd * (row_mean[i] - grand) * (row_mean[i] - grand);
  for (std::size_t j = 0; j < k; ++j) ss_cond += nd * (col_mean[j] - grand) * (col_mean[j] - grand);
  const double ss_err = ss_total - ss_subj - ss_cond;

  AnovaResult r;
  const double df1 = kd - 1.0;
  const double df2 = (kd - 1.0) * (nd - 1.0);
  const double ms_cond = ss_cond / df1;
  const double ms_err = ss_err / df2;

  // Greenhouse-Geisser epsilon from the double-centered condition covariance.
  double eps = 1.0;
  {
    std::vector<std::vector<double>> S(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          s += (m.rows[i][a] - col_mean[a]) * (m.rows[i][b] - col_mean[b]);
        S[a][b] = s / (nd - 1.0);
      }
    // Center rows and columns of S.
    std::vector<double> rmean(k, 0.0);
    double smean = 0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) rmean[a] += S[a][b];
      rmean[a] /= kd;
      smean += rmean[a];
    }
    smean /= kd;
    double trace = 0, frob2 = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const double c = S[a][b] - rmean[a] - rmean[b] + smean;
        if (a == b) trace += c;
        frob2 += c * c;
      }
    if (frob2 > 0) eps = trace * trace / (df1 * frob2);
  }
  r.epsilon = eps;

  if (ms_err <= 0) {
    if (ss_cond <= 1e-12 * (std::abs(ss_total) + 1)) {
      // No condition effect and no error variance: report the null outcome.
      r.F = 0;
      r.df1 = df1;
      r.df2 = df2;
      r.p = 1.0;
      r.epsilon = 1.0;
      return r;
    }
    throw std::domain_error("rm_anova: zero error mean square");
  }

  r.F = ms_cond / ms_err;
  if (correction == SphericityCorrection::greenhouse_geisser) {
    r.df1 = eps * df1;
    r.df2 = eps * df2;
  } else {
    r.df1 = df1;
    r.df2 = df2;
  }
  r.p = f_tail_p(r.F, r.df1, r.df2);
  return r;
}

TTestResult paired_t(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired_t: unequal lengths");
  if (x.size() < 2) throw std::invalid_argument("paired_t: need length >= 2");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double md = sample_mean(d);
  const double sd = sample_sd(d);
  if (sd <= 0) {
    if (md == 0) return {0, static_cast<double>(x.size() - 1), 1.0, 0};
    throw std::domain_error("paired_t: zero-variance differences");
  }
  TTestResult r;
  const double n = static_cast<double>(d.size());
  r.t = md / (sd / std::sqrt(n));
  r.df = n - 1;
  r.p = t_two_sided_p(r.t, r.df);
  r.cohen_d = md / sd;
  return r;
}

TTestResult two_sample_t(const std::vector<double>& x, const std::vector<double>& y, bool welch) {
  if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("two_sample_t: need n >= 2 each");
  const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
  const double m1 = sample_mean(x), m2 = sample_mean(y);
  const double v1 = sample_variance(x), v2 = sample_variance(y);
  const double pooled_var = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2);

  TTestResult r;
  if (welch) {
    const double a = v1 / n1, b = v2 / n2;
    if (a + b <= 0) throw std::domain_error("two_sample_t: zero variance");
    r.t = (m1 - m2) / std::sqrt(a + b);
    r.df = (a + b) * (a + b) / (a * a / (n1 - 1) + b * b / (n2 - 1));
  } else {
    if (pooled_var <= 0) {
      if (m1 == m2) return {0, n1 + n2 - 2, 1.0, 0};
      throw std::domain_error("two_sample_t: zero pooled variance");
    }
    r.t = (m1 - m2) / (std::sqrt(pooled_var) * std::sqrt(1.0 / n1 + 1.0 / n2));
    r.df = n1 + n2 - 2;
  }
  r.p = t_two_sided_p(r.t, r.df);
  r.cohen_d = pooled_var > 0 ? (m1 - m2) / std::sqrt(pooled_var) : 0.0;
  return r;
}

}  // namespace mobsense
