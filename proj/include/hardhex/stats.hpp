// Small statistics toolkit: goodness-of-fit tests, exact binomial tails and
// least-squares lines.
#pragma once

#include <cstdint>
#include <vector>

namespace hardhex::stats {

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// Asymptotic one-sample critical value of sqrt(n) D at level alpha, i.e.
/// the x with Q(x) = alpha.
double kolmogorov_critical(double alpha);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS of the data against Exp(1).
KsResult ks_exponential(std::vector<double> data);

/// Two-sample KS with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

/// Two-sided exact binomial test of k successes in n trials with success
/// probability p (doubling the smaller tail, capped at 1).
double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 1;
};

/// Pearson chi-square of independence on a 2x2 table (no continuity
/// correction).
ChiSquareResult chi_square_2x2(double n00, double n01, double n10, double n11);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares of y on x. Needs at least two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t count = 0;
  double standard_error() const;
};

Moments moments(const std::vector<double>& x);

}  // namespace hardhex::stats
