#include "hardhex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

namespace hardhex::stats {

double kolmogorov_q(double x) {
  if (x <= 0.0) return 1.0;
  // For small x the alternating series converges slowly; use the Jacobi
  // theta form P(x) = sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
  if (x < 1.18) {
    const double pi = 3.14159265358979323846;
    const double c = -pi * pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double term = std::exp(c * (2 * k - 1) * (2 * k - 1));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2.0 * pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    q += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

double kolmogorov_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  // Q is strictly decreasing.
  auto f = [alpha](double x) { return kolmogorov_q(x) - alpha; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(f, 0.2, 5.0, tol, iters);
  return 0.5 * (r.first + r.second);
}

KsResult ks_exponential(std::vector<double> data) {
  if (data.empty()) throw std::invalid_argument("KS test needs data");
  std::sort(data.begin(), data.end());
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = data[i] > 0.0 ? -std::expm1(-data[i]) : 0.0;
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("KS test needs data");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p) {
  if (n == 0 || k > n) throw std::invalid_argument("binomial test needs 0 <= k <= n, n > 0");
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  const double kd = static_cast<double>(k);
  const double lower = boost::math::cdf(dist, kd);
  const double upper = k == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, kd - 1.0));
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

ChiSquareResult chi_square_2x2(double n00, double n01, double n10, double n11) {
  const double n = n00 + n01 + n10 + n11;
  const double r0 = n00 + n01, r1 = n10 + n11, c0 = n00 + n10, c1 = n01 + n11;
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0) {
    throw std::invalid_argument("2x2 table has an empty margin");
  }
  const double obs[4] = {n00, n01, n10, n11};
  const double exp[4] = {r0 * c0 / n, r0 * c1 / n, r1 * c0 / n, r1 * c1 / n};
  double chi = 0.0;
  for (int k = 0; k < 4; ++k) chi += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
  const boost::math::chi_squared_distribution<double> dist(1.0);
  return {chi, boost::math::cdf(boost::math::complement(dist, chi)), 1};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

double Moments::standard_error() const {
  return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

Moments moments(const std::vector<double>& x) {
  Moments m;
  m.count = x.size();
  if (x.empty()) return m;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : x) {
    ++k;
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  m.mean = mean;
  m.variance = x.size() > 1 ? m2 / static_cast<double>(x.size() - 1) : 0.0;
  return m;
}

}  // namespace hardhex::stats
