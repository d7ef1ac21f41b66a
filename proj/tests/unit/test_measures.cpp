#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "zrplab/errors.hpp"
#include "zrplab/measures.hpp"
#include "zrplab/rng.hpp"

using namespace zrplab;

namespace {

// Oracles written directly from the closed forms.
double geo_oracle(double rho, int k) { return std::pow(rho / (1 + rho), k) / (1 + rho); }

double conv_oracle(double rho, int k) {
  double s = 0.0;
  for (int j = 0; j <= k; ++j) {
    s += geo_oracle(rho, j) * geo_oracle(rho, k - j);
  }
  return s;
}

double binom(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) {
    c = c * (n - k + j) / j;
  }
  return c;
}

double negbin_oracle(int n, double lam, int z) {
  return binom(n + z - 1, n - 1) * std::pow(lam / (1 + lam), z) * std::pow(1 / (1 + lam), n);
}

// Upper tail of the chi-square distribution for large dof via Wilson-Hilferty.
double chi2_upper(double x, double dof) {
  const double z = (std::cbrt(x / dof) - (1 - 2 / (9 * dof))) / std::sqrt(2 / (9 * dof));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double chi_square_pvalue(const Law& law, int draws, std::uint64_t seed) {
  SplitMix64 gen(seed);
  std::vector<double> counts(64, 0.0);
  for (int n = 0; n < draws; ++n) {
    const auto k = sample_via_quantile(law, gen.uniform());
    counts[std::min<std::size_t>(static_cast<std::size_t>(k), counts.size() - 1)] += 1;
  }
  // Merge the tail so every expected count is at least 5.
  double stat = 0.0;
  int cells = 0;
  double tail_obs = 0.0;
  double tail_exp = 1.0;
  for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
    const double e = pmf(law, static_cast<std::int64_t>(k)) * draws;
    if (e < 5.0) {
      break;
    }
    stat += (counts[k] - e) * (counts[k] - e) / e;
    tail_exp -= e / draws;
    ++cells;
  }
  for (std::size_t k = static_cast<std::size_t>(cells); k < counts.size(); ++k) {
    tail_obs += counts[k];
  }
  tail_exp *= draws;
  stat += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
  return chi2_upper(stat, cells);
}

}  // namespace

TEST(Density, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(Density(-0.1), std::domain_error);
  EXPECT_THROW(Density(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  EXPECT_THROW(Density(std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_NO_THROW(Density(0.0));
  EXPECT_DOUBLE_EQ(Density(1.0).ratio(), 0.5);
}

TEST(GeometricPmf, Examples) {
  EXPECT_DOUBLE_EQ(geometric_pmf(Density(1), 0), 0.5);
  EXPECT_DOUBLE_EQ(geometric_pmf(Density(0), 0), 1.0);
  EXPECT_DOUBLE_EQ(geometric_pmf(Density(1), 2), 0.125);
  EXPECT_THROW(geometric_pmf(Density(1), -1), std::domain_error);
}

TEST(GeometricCdf, Examples) {
  EXPECT_DOUBLE_EQ(geometric_cdf(Density(1), 0), 0.5);
  EXPECT_DOUBLE_EQ(geometric_cdf(Density(1), 2), 0.875);
  EXPECT_NEAR(geometric_cdf(Density(0.5), 1), 8.0 / 9.0, 1e-15);
  EXPECT_THROW(geometric_cdf(Density(1), -3), std::domain_error);
}

TEST(GeometricCdf, StrictlyDecreasingInDensity) {
  for (int z = 0; z <= 20; ++z) {
    for (double rho = 0.05; rho < 5.0; rho += 0.05) {
      const double lo = geometric_cdf(Density(rho), z);
      const double hi = geometric_cdf(Density(rho + 0.05), z);
      // Strict only where the tail r^(z+1) is resolvable next to 1.
      if (std::pow(rho / (1.0 + rho), z + 1) > 1e-12) {
        EXPECT_GT(lo, hi) << "z=" << z << " rho=" << rho;
      } else {
        EXPECT_GE(lo, hi) << "z=" << z << " rho=" << rho;
      }
    }
  }
}

TEST(MuHatPmf, Examples) {
  EXPECT_DOUBLE_EQ(mu_hat_pmf(Density(1), 0), 0.25);
  EXPECT_DOUBLE_EQ(mu_hat_pmf(Density(0), 0), 1.0);
  EXPECT_DOUBLE_EQ(mu_hat_pmf(Density(1), 1), 0.25);
  EXPECT_DOUBLE_EQ(mu_hat_pmf(Density(0), 3), 0.0);
  EXPECT_THROW(mu_hat_pmf(Density(1), -1), std::domain_error);
}

TEST(MuHatPmf, IsTwoFoldConvolution) {
  for (double rho : {0.1, 0.5, 1.0, 3.0}) {
    for (int k = 0; k <= 40; ++k) {
      EXPECT_NEAR(mu_hat_pmf(Density(rho), k), conv_oracle(rho, k), 1e-14);
    }
  }
}

TEST(MuHatCdf, MatchesPartialSums) {
  for (double rho : {0.2, 1.0, 2.5}) {
    double s = 0.0;
    for (int z = 0; z <= 30; ++z) {
      s += conv_oracle(rho, z);
      EXPECT_NEAR(mu_hat_cdf(Density(rho), z), s, 1e-13);
    }
  }
}

TEST(NegBinPmf, Examples) {
  EXPECT_DOUBLE_EQ(negbin_pmf(1, Density(1), 2), 0.125);
  EXPECT_DOUBLE_EQ(negbin_pmf(2, Density(1), 1), 0.25);
  EXPECT_DOUBLE_EQ(negbin_pmf(3, Density(0), 0), 1.0);
  EXPECT_THROW(negbin_pmf(0, Density(1), 0), std::domain_error);
  EXPECT_THROW(Law::neg_bin(0, Density(1)), std::domain_error);
}

TEST(NegBinPmf, MatchesBinomialOracle) {
  for (int n : {1, 2, 3, 7}) {
    for (double lam : {0.3, 1.0, 2.0}) {
      for (int z = 0; z <= 40; ++z) {
        EXPECT_NEAR(negbin_pmf(n, Density(lam), z), negbin_oracle(n, lam, z), 1e-13);
      }
    }
  }
}

TEST(NegBinPmf, TwoTrialsEqualsMuHat) {
  for (double rho : {0.25, 1.0, 4.0}) {
    for (int z = 0; z <= 50; ++z) {
      EXPECT_NEAR(negbin_pmf(2, Density(rho), z), mu_hat_pmf(Density(rho), z), 1e-12);
    }
  }
}

TEST(Pmf, SumsToOne) {
  for (double rho : {0.0, 0.3, 1.0, 2.0}) {
    for (const auto& law : {Law::geometric(Density(rho)), Law::mu_hat(Density(rho)),
                            Law::neg_bin(3, Density(rho))}) {
      double s = 0.0;
      for (int k = 0; k <= 400; ++k) {
        s += pmf(law, k);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Law, Means) {
  EXPECT_DOUBLE_EQ(mean(Law::geometric(Density(1.5))), 1.5);
  EXPECT_DOUBLE_EQ(mean(Law::mu_hat(Density(1.5))), 3.0);
  EXPECT_DOUBLE_EQ(mean(Law::neg_bin(4, Density(0.5))), 2.0);
}

TEST(SampleViaQuantile, Examples) {
  EXPECT_EQ(sample_via_quantile(Law::geometric(Density(1)), 0.0), 0);
  EXPECT_EQ(sample_via_quantile(Law::geometric(Density(1)), 0.6), 1);
  EXPECT_EQ(sample_via_quantile(Law::mu_hat(Density(1)), 0.2), 0);
  EXPECT_EQ(sample_via_quantile(Law::geometric(Density(0)), 0.999), 0);
}

TEST(SampleViaQuantile, RejectsOutOfRange) {
  const auto law = Law::geometric(Density(1));
  EXPECT_THROW(sample_via_quantile(law, 1.0), std::domain_error);
  EXPECT_THROW(sample_via_quantile(law, -0.01), std::domain_error);
  EXPECT_THROW(sample_via_quantile(law, std::numeric_limits<double>::quiet_NaN()),
               std::domain_error);
}

TEST(SampleViaQuantile, SmallestZAboveU) {
  SplitMix64 gen(11);
  for (const auto& law : {Law::geometric(Density(0.7)), Law::mu_hat(Density(1.3)),
                          Law::neg_bin(4, Density(0.4))}) {
    for (int n = 0; n < 20000; ++n) {
      const double u = gen.uniform();
      const auto z = sample_via_quantile(law, u);
      EXPECT_GT(cdf(law, z), u);
      if (z > 0) {
        EXPECT_LE(cdf(law, z - 1), u);
      }
    }
  }
}

TEST(SampleViaQuantile, GeometricClosedFormAgrees) {
  SplitMix64 gen(5);
  for (double rho : {0.2, 1.0, 3.0}) {
    for (int n = 0; n < 20000; ++n) {
      const double u = gen.uniform();
      EXPECT_EQ(geometric_from_uniform(Density(rho), u),
                sample_via_quantile(Law::geometric(Density(rho)), u));
    }
  }
}

TEST(SampleViaQuantile, ChiSquareAtMillionDraws) {
  EXPECT_GT(chi_square_pvalue(Law::geometric(Density(1.0)), 1000000, 1), 1e-3);
  EXPECT_GT(chi_square_pvalue(Law::mu_hat(Density(1.0)), 1000000, 2), 1e-3);
  EXPECT_GT(chi_square_pvalue(Law::geometric(Density(0.4)), 1000000, 3), 1e-3);
  EXPECT_GT(chi_square_pvalue(Law::neg_bin(3, Density(0.8)), 1000000, 4), 1e-3);
}

TEST(MuHatFromUniforms, MatchesLawInMean) {
  SplitMix64 gen(9);
  double s = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    s += static_cast<double>(mu_hat_from_uniforms(Density(1.0), gen.uniform(), gen.uniform()));
  }
  // mean 2, variance 2 rho (1 + rho) = 4
  EXPECT_NEAR(s / n, 2.0, 4.0 * std::sqrt(4.0 / n));
}

TEST(CoupleMonotone, Examples) {
  EXPECT_EQ(couple_monotone(Law::geometric(Density(0.5)), Law::geometric(Density(1)), 0.9),
            (std::pair<std::int64_t, std::int64_t>{2, 3}));
  const auto same = couple_monotone(Law::geometric(Density(1)), Law::geometric(Density(1)), 0.37);
  EXPECT_EQ(same.first, same.second);
  EXPECT_EQ(couple_monotone(Law::geometric(Density(1)), Law::mu_hat(Density(1)), 0.3),
            (std::pair<std::int64_t, std::int64_t>{0, 1}));
}

TEST(CoupleMonotone, RejectsUndominatedPairs) {
  EXPECT_THROW(couple_monotone(Law::geometric(Density(1)), Law::geometric(Density(0.5)), 0.5),
               ConfigError);
  EXPECT_THROW(couple_monotone(Law::mu_hat(Density(1)), Law::mu_hat(Density(0.2)), 0.5),
               ConfigError);
  EXPECT_THROW(couple_monotone(Law::mu_hat(Density(1)), Law::geometric(Density(1)), 0.5),
               ConfigError);
}

TEST(CoupleMonotone, OrderedOnDenseGridAndRandomDraws) {
  const std::vector<std::pair<Law, Law>> pairs = {
      {Law::geometric(Density(0.5)), Law::geometric(Density(1))},
      {Law::mu_hat(Density(0.8)), Law::mu_hat(Density(1))},
      {Law::geometric(Density(1)), Law::mu_hat(Density(1))},
      {Law::geometric(Density(0)), Law::geometric(Density(2))}};
  for (const auto& [lo, hi] : pairs) {
    for (int k = 0; k < 100000; ++k) {
      const auto [a, b] = couple_monotone(lo, hi, k / 100000.0);
      ASSERT_LE(a, b);
    }
  }
  SplitMix64 gen(21);
  const auto& [lo, hi] = pairs.front();
  for (int k = 0; k < 1000000; ++k) {
    const auto [a, b] = couple_monotone(lo, hi, gen.uniform());
    ASSERT_LE(a, b);
  }
}

TEST(CoupleMonotone, MarginalsAreTheQuantiles) {
  SplitMix64 gen(4);
  const auto lo = Law::geometric(Density(0.5));
  const auto hi = Law::mu_hat(Density(1.0));
  for (int k = 0; k < 10000; ++k) {
    const double u = gen.uniform();
    const auto [a, b] = couple_monotone(lo, hi, u);
    EXPECT_EQ(a, sample_via_quantile(lo, u));
    EXPECT_EQ(b, sample_via_quantile(hi, u));
  }
}

TEST(DominatedBy, Pairs) {
  EXPECT_TRUE(dominated_by(Law::geometric(Density(0.5)), Law::geometric(Density(1))));
  EXPECT_FALSE(dominated_by(Law::geometric(Density(1)), Law::geometric(Density(0.5))));
  EXPECT_TRUE(dominated_by(Law::geometric(Density(1)), Law::mu_hat(Density(1))));
  EXPECT_FALSE(dominated_by(Law::mu_hat(Density(1)), Law::geometric(Density(1))));
}
