#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace zrplab {

/// A point estimate with its standard error over `n` replicas.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean with stderr s / sqrt(n).
Estimate mean_estimate(std::span<const double> x);

/// Unbiased sample variance with a delete-1 jackknife stderr.
Estimate variance_estimate(std::span<const double> x);

/// Mean of |x - center|^m; its jackknife stderr coincides with s / sqrt(n).
Estimate abs_moment_estimate(std::span<const double> x, double center, double m);

/// Proportion of x equal to `value`, binomial stderr.
Estimate proportion_estimate(std::span<const double> x, double value);

/// (a - b) / sqrt(se_a^2 + se_b^2); zero when both errors and the difference
/// vanish.
double z_score(const Estimate& a, const Estimate& b);

double standard_normal_cdf(double x);

/// sup_x |F_n(x) - Phi(x)| for continuous data.
double ks_distance_normal(std::vector<double> standardized);

/// Kolmogorov-Smirnov distance for integer data against N(mean, sd^2) with
/// the lattice continuity correction: F_n(k) is compared with
/// Phi((k + 1/2 - mean) / sd) at every integer k of the sample range.
double ks_distance_normal_lattice(std::vector<std::int64_t> values, double mean, double sd);

}  // namespace zrplab
