#include "zrplab/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "zrplab/errors.hpp"

namespace zrplab {

namespace {

void require_nonnegative(std::int64_t k, const char* what) {
  if (k < 0) {
    throw std::domain_error(std::string(what) + " must be nonnegative");
  }
}

// log C(n + z - 1, n - 1) as a product over the shorter side.
double log_negbin_coefficient(std::int64_t n, std::int64_t z) {
  const std::int64_t steps = std::min(n - 1, z);
  const std::int64_t other = std::max(n - 1, z);
  double acc = 0.0;
  for (std::int64_t j = 1; j <= steps; ++j) {
    acc += std::log(static_cast<double>(other + j) / static_cast<double>(j));
  }
  return acc;
}

std::int64_t scan_quantile(const Law& law, double u, std::int64_t start) {
  std::int64_t z = start;
  while (z > 0 && cdf(law, z - 1) > u) {
    --z;
  }
  while (cdf(law, z) <= u) {
    ++z;
  }
  return z;
}

}  // namespace

Density::Density(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::domain_error("density must be finite and nonnegative");
  }
}

Law Law::neg_bin(std::int64_t n, Density rho) {
  if (n < 1) {
    throw std::domain_error("negative binomial needs n >= 1");
  }
  return {LawKind::neg_bin, rho, n};
}

double geometric_pmf(Density rho, std::int64_t k) {
  require_nonnegative(k, "k");
  return std::pow(rho.ratio(), static_cast<double>(k)) * rho.success();
}

double geometric_cdf(Density rho, std::int64_t z) {
  require_nonnegative(z, "z");
  return 1.0 - std::pow(rho.ratio(), static_cast<double>(z + 1));
}

double mu_hat_pmf(Density rho, std::int64_t k) {
  require_nonnegative(k, "k");
  const double p = rho.success();
  return static_cast<double>(k + 1) * std::pow(rho.ratio(), static_cast<double>(k)) * p * p;
}

double mu_hat_cdf(Density rho, std::int64_t z) {
  require_nonnegative(z, "z");
  // P(X > z) = q^{z+1} (1 + (z+1) p) for the sum of two geometrics.
  const double a = static_cast<double>(z + 1);
  return 1.0 - std::pow(rho.ratio(), a) * (1.0 + a * rho.success());
}

double negbin_pmf(std::int64_t n, Density lambda, std::int64_t z) {
  if (n < 1) {
    throw std::domain_error("negative binomial needs n >= 1");
  }
  require_nonnegative(z, "z");
  if (lambda.value() == 0.0) {
    return z == 0 ? 1.0 : 0.0;
  }
  const double log_p = -std::log1p(lambda.value());
  const double log_q = std::log(lambda.value()) + log_p;
  return std::exp(log_negbin_coefficient(n, z) + static_cast<double>(n) * log_p +
                  static_cast<double>(z) * log_q);
}

double negbin_cdf(std::int64_t n, Density lambda, std::int64_t z) {
  require_nonnegative(z, "z");
  double acc = 0.0;
  for (std::int64_t k = 0; k <= z; ++k) {
    acc += negbin_pmf(n, lambda, k);
  }
  return std::min(acc, 1.0);
}

double pmf(const Law& law, std::int64_t k) {
  switch (law.kind) {
    case LawKind::geometric:
      return geometric_pmf(law.density, k);
    case LawKind::mu_hat:
      return mu_hat_pmf(law.density, k);
    case LawKind::neg_bin:
      return negbin_pmf(law.trials, law.density, k);
  }
  return 0.0;
}

double cdf(const Law& law, std::int64_t z) {
  switch (law.kind) {
    case LawKind::geometric:
      return geometric_cdf(law.density, z);
    case LawKind::mu_hat:
      return mu_hat_cdf(law.density, z);
    case LawKind::neg_bin:
      return negbin_cdf(law.trials, law.density, z);
  }
  return 1.0;
}

double mean(const Law& law) { return static_cast<double>(law.trials) * law.density.value(); }

bool dominated_by(const Law& lo, const Law& hi) {
  // Every law here is a sum of `trials` i.i.d. geometrics.
  return lo.trials <= hi.trials && lo.density <= hi.density;
}

std::int64_t geometric_from_uniform(Density rho, double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::domain_error("uniform must lie in [0, 1)");
  }
  const double q = rho.ratio();
  if (q <= 0.0) {
    return 0;
  }
  const double z = std::floor(std::log1p(-u) / std::log(q));
  return z < 0.0 ? 0 : static_cast<std::int64_t>(z);
}

std::int64_t sample_via_quantile(const Law& law, double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::domain_error("uniform must lie in [0, 1)");
  }
  if (law.density.value() == 0.0) {
    return 0;
  }
  std::int64_t start = 0;
  if (law.kind == LawKind::geometric) {
    start = geometric_from_uniform(law.density, u);
  }
  return scan_quantile(law, u, start);
}

std::pair<std::int64_t, std::int64_t> couple_monotone(const Law& lo, const Law& hi, double u) {
  if (!dominated_by(lo, hi)) {
    throw ConfigError("coupling requires the lower law to be stochastically dominated");
  }
  const auto k_lo = sample_via_quantile(lo, u);
  const auto k_hi = lo == hi ? k_lo : sample_via_quantile(hi, u);
  if (k_lo > k_hi) {
    throw InvariantViolation("quantile coupling produced an unordered pair");
  }
  return {k_lo, k_hi};
}

std::int64_t mu_hat_from_uniforms(Density rho, double u1, double u2) {
  return geometric_from_uniform(rho, u1) + geometric_from_uniform(rho, u2);
}

}  // namespace zrplab
