#include "zrplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace zrplab {

namespace {

double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

Estimate mean_estimate(std::span<const double> x) {
  Estimate e;
  e.n = x.size();
  if (x.empty()) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.value = sample_mean(x);
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) {
      ss += (v - e.value) * (v - e.value);
    }
    e.std_error = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  }
  return e;
}

Estimate variance_estimate(std::span<const double> x) {
  Estimate e;
  e.n = x.size();
  if (x.size() < 2) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  const double n = static_cast<double>(x.size());
  const double center = sample_mean(x);
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : x) {
    const double d = v - center;
    s1 += d;
    s2 += d * d;
  }
  e.value = (s2 - s1 * s1 / n) / (n - 1.0);
  if (x.size() < 3) {
    return e;
  }
  // Leave-one-out variances from the centered power sums.
  std::vector<double> loo(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center;
    const double a = s1 - d;
    const double b = s2 - d * d;
    loo[i] = (b - a * a / (n - 1.0)) / (n - 2.0);
  }
  const double loo_mean = sample_mean(loo);
  double ss = 0.0;
  for (double v : loo) {
    ss += (v - loo_mean) * (v - loo_mean);
  }
  e.std_error = std::sqrt((n - 1.0) / n * ss);
  return e;
}

Estimate abs_moment_estimate(std::span<const double> x, double center, double m) {
  std::vector<double> y;
  y.reserve(x.size());
  for (double v : x) {
    y.push_back(std::pow(std::abs(v - center), m));
  }
  return mean_estimate(y);
}

Estimate proportion_estimate(std::span<const double> x, double value) {
  Estimate e;
  e.n = x.size();
  if (x.empty()) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  const auto hits = std::count(x.begin(), x.end(), value);
  const double p = static_cast<double>(hits) / static_cast<double>(x.size());
  e.value = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(x.size()));
  return e;
}

double z_score(const Estimate& a, const Estimate& b) {
  const double diff = a.value - b.value;
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  if (se == 0.0) {
    return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return diff / se;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double> standardized) {
  if (standardized.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(standardized.begin(), standardized.end());
  const double n = static_cast<double>(standardized.size());
  double d = 0.0;
  for (std::size_t i = 0; i < standardized.size(); ++i) {
    const double phi = standard_normal_cdf(standardized[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - phi, phi - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance_normal_lattice(std::vector<std::int64_t> values, double mean, double sd) {
  if (values.empty() || !(sd > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  std::size_t below = 0;
  for (std::int64_t k = values.front() - 1; k <= values.back(); ++k) {
    while (below < values.size() && values[below] <= k) {
      ++below;
    }
    const double fn = static_cast<double>(below) / n;
    const double phi = standard_normal_cdf((static_cast<double>(k) + 0.5 - mean) / sd);
    d = std::max(d, std::abs(fn - phi));
  }
  // Tails beyond the sample range.
  d = std::max(d, 1.0 - standard_normal_cdf((static_cast<double>(values.back()) + 0.5 - mean) / sd));
  return d;
}

}  // namespace zrplab
