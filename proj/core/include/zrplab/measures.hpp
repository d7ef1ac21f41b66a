#pragma once

#include <compare>
#include <cstdint>
#include <utility>

namespace zrplab {

/// Mean occupancy per site. Zero is admitted as the point mass at 0.
class Density {
 public:
  constexpr Density() = default;
  explicit Density(double value);

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  /// rho / (1 + rho), the geometric ratio of the occupation law.
  [[nodiscard]] double ratio() const noexcept { return value_ / (1.0 + value_); }
  /// 1 / (1 + rho), the geometric success probability.
  [[nodiscard]] double success() const noexcept { return 1.0 / (1.0 + value_); }

  friend constexpr auto operator<=>(const Density&, const Density&) = default;

 private:
  double value_ = 0.0;
};

enum class LawKind { geometric, mu_hat, neg_bin };

/// One of the occupation laws used by the initial measures.
struct Law {
  LawKind kind = LawKind::geometric;
  Density density;
  std::int64_t trials = 1;  // only meaningful for neg_bin

  static Law geometric(Density rho) { return {LawKind::geometric, rho, 1}; }
  /// Sum of two independent geometric variables with mean rho.
  static Law mu_hat(Density rho) { return {LawKind::mu_hat, rho, 2}; }
  static Law neg_bin(std::int64_t n, Density rho);

  friend bool operator==(const Law&, const Law&) = default;
};

double geometric_pmf(Density rho, std::int64_t k);
double geometric_cdf(Density rho, std::int64_t z);
double mu_hat_pmf(Density rho, std::int64_t k);
double mu_hat_cdf(Density rho, std::int64_t z);
double negbin_pmf(std::int64_t n, Density lambda, std::int64_t z);
double negbin_cdf(std::int64_t n, Density lambda, std::int64_t z);

double pmf(const Law& law, std::int64_t k);
double cdf(const Law& law, std::int64_t z);
double mean(const Law& law);

/// True when `lo` is stochastically dominated by `hi` for the pairs the
/// couplings use: geometric/geometric and mu_hat/mu_hat with ordered
/// densities, and geometric(rho) below mu_hat(rho') for rho <= rho'.
bool dominated_by(const Law& lo, const Law& hi);

/// Smallest z with cdf(law, z) > u. Throws std::domain_error unless u is in [0, 1).
std::int64_t sample_via_quantile(const Law& law, double u);

/// Common-uniform quantile coupling of two ordered laws; first <= second.
/// Throws ConfigError when `lo` is not dominated by `hi`.
std::pair<std::int64_t, std::int64_t> couple_monotone(const Law& lo, const Law& hi,
                                                      double u);

/// Closed-form geometric inversion, floor(log(1-u)/log(rho/(1+rho))).
std::int64_t geometric_from_uniform(Density rho, double u);

/// mu_hat as the sum of two independent geometric draws. Not monotone in its
/// inputs jointly, so never used inside couplings.
std::int64_t mu_hat_from_uniforms(Density rho, double u1, double u2);

}  // namespace zrplab
