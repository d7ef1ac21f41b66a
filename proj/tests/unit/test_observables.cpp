#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "zrplab/engine.hpp"
#include "zrplab/errors.hpp"
#include "zrplab/observables.hpp"
#include "zrplab/stats.hpp"

using namespace zrplab;

namespace {

Configuration make_config(Window w, std::map<Site, int> counts) {
  Configuration c(w);
  for (auto [i, n] : counts) {
    c.set(i, n);
  }
  return c;
}

}  // namespace

TEST(IntTowardZero, Examples) {
  EXPECT_EQ(int_toward_zero(2.7), 2);
  EXPECT_EQ(int_toward_zero(-2.7), -2);
  EXPECT_EQ(int_toward_zero(-3.0), -3);
  EXPECT_EQ(int_toward_zero(0.0), 0);
  EXPECT_EQ(int_toward_zero(-0.4), 0);
}

TEST(InitialHeight, Examples) {
  const Window w{-5, 5};
  const auto empty = Configuration(w);
  for (Site i = w.lo; i <= w.hi; ++i) {
    EXPECT_EQ(initial_height(empty, i), 0);
  }
  EXPECT_EQ(initial_height(make_config(w, {{0, 1}}), -1), 1);
  EXPECT_EQ(initial_height(make_config(w, {{0, 1}}), 0), 0);
  EXPECT_EQ(initial_height(make_config(w, {{1, 2}}), 2), -2);
  EXPECT_THROW(initial_height(empty, 6), std::domain_error);
}

TEST(HeightLedger, IncrementsAreOccupancies) {
  const Window w{-6, 6};
  const auto c = make_config(w, {{-6, 1}, {-2, 3}, {0, 2}, {1, 1}, {4, 5}});
  const HeightLedger ledger(c);
  EXPECT_EQ(ledger.at(0), 0);
  for (Site i = w.lo + 1; i <= w.hi; ++i) {
    EXPECT_EQ(ledger.at(i - 1) - ledger.at(i), c.at(i));
    EXPECT_EQ(ledger.at(i), initial_height(c, i));
  }
  EXPECT_EQ(ledger.initial_right_mass(), 6);
  EXPECT_THROW((void)ledger.at(7), std::domain_error);
}

TEST(ModelConstants, Examples) {
  const auto zero = model_constants(Density(0));
  EXPECT_DOUBLE_EQ(zero.flux, 0.0);
  EXPECT_DOUBLE_EQ(zero.characteristic_speed, 1.0);
  EXPECT_DOUBLE_EQ(zero.variance, 0.0);
  const auto one = model_constants(Density(1));
  EXPECT_DOUBLE_EQ(one.flux, 0.5);
  EXPECT_DOUBLE_EQ(one.characteristic_speed, 0.25);
  EXPECT_DOUBLE_EQ(one.variance, 2.0);
}

TEST(ModelConstants, SpeedIsFluxDerivative) {
  for (double rho = 0.1; rho < 5.0; rho += 0.1) {
    const double h = 1e-5;
    const double fd = (hydrodynamic_flux(rho + h) - hydrodynamic_flux(rho - h)) / (2 * h);
    EXPECT_LT(std::abs(fd / characteristic_speed(rho) - 1.0), 1e-6) << rho;
  }
}

TEST(CurrentAt, TimeZeroAndBondZero) {
  ScenarioSpec spec;
  spec.kind = Stationary{1.0};
  spec.horizon = 20;
  auto e = init_scenario(spec, 1);
  for (double v : {-1.0, 0.0, 0.25, 1.0}) {
    EXPECT_EQ(current_at(e, 0, v, 0.0).value, 0);
  }
  run(e, spec);
  const Window w = e.window();
  EXPECT_EQ(current_at(e, 0, 0.0, 20.0).value, e.bond_counts(0)[w.index(0)]);
  EXPECT_THROW(current_at(e, 0, 100.0, 20.0), std::domain_error);
}

TEST(CurrentAt, MatchesRecountFromOccupancies) {
  ScenarioSpec spec;
  spec.kind = MuHatPair{1.0};
  spec.horizon = 40;
  auto e = init_scenario(spec, 2);
  run(e, spec);
  for (double v : {-0.5, 0.0, 0.25, 1.0}) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto j = current_at(e, c, v, 40.0);
      EXPECT_EQ(j.value, height_from_counts(e.config(c), e.heights(c).initial_right_mass(),
                                            int_toward_zero(v * 40.0)));
    }
  }
}

TEST(CurrentAt, StationaryMeanCurrent) {
  ScenarioSpec spec;
  spec.kind = Stationary{1.0};
  spec.horizon = 100;
  spec.checkpoints = {100};
  spec.observers = {0.0, 0.25, 1.0};
  const int n = 10000;
  std::vector<std::vector<double>> j(3);
  for (int r = 0; r < n; ++r) {
    auto e = init_scenario(spec, static_cast<std::uint64_t>(r));
    const auto log = run(e, spec);
    for (std::size_t k = 0; k < 3; ++k) {
      j[k].push_back(static_cast<double>(log.records.back().currents[0][k]));
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double v = spec.observers[k];
    const double expected = 0.5 * 100 - 1.0 * static_cast<double>(int_toward_zero(v * 100));
    const auto m = mean_estimate(j[k]);
    EXPECT_LT(std::abs(m.value - expected), 4.0 * m.std_error) << "V=" << v;
  }
}

TEST(CountIntervalDefects, Examples) {
  const Window w{-10, 10};
  const auto c = make_config(w, {{2, 1}});
  EXPECT_EQ(count_interval_defects(c, c, 0, 3), 0);
  const auto up = make_config(w, {{2, 2}});
  EXPECT_EQ(count_interval_defects(c, up, 1, 1), 1);
  EXPECT_EQ(count_interval_defects(c, up, 2, 1), 0);
  EXPECT_THROW(count_interval_defects(c, up, 5, 4), std::domain_error);
}

TEST(CountIntervalDefects, ThreeProcessInitialMean) {
  ScenarioSpec spec;
  spec.kind = ThreeProcess{1.0, 0.5};
  spec.horizon = 100;
  std::vector<double> n;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    const auto e = init_scenario(spec, r);
    n.push_back(static_cast<double>(count_interval_defects(e.config(0), e.config(1), 0, 100)));
  }
  const auto m = mean_estimate(n);
  EXPECT_LT(std::abs(m.value - 99.5), 4.0 * m.std_error);
}

TEST(TasepView, Examples) {
  EXPECT_EQ(tasep_view(0, 0), 0);
  EXPECT_EQ(tasep_view(-2, 1), 3);  // h_1 = -omega_1 = -2
  EXPECT_DOUBLE_EQ(tasep_rho_from_alpha(0.5), 1.0);
  const Window w{-2, 3};
  const auto c = make_config(w, {{1, 2}, {-1, 1}});
  const auto s = tasep_from_zrp(c);
  EXPECT_EQ(s.positions[w.index(0)], 0);
  EXPECT_EQ(s.positions[w.index(1)], 3);
  EXPECT_EQ(s.positions[w.index(-1)], -1);
  EXPECT_EQ(s.positions[w.index(-2)], -3);
  const auto gaps = tasep_gaps(s);
  for (Site i = w.lo + 1; i <= w.hi; ++i) {
    EXPECT_EQ(gaps[static_cast<std::size_t>(i - w.lo - 1)], c.at(i));
  }
}

TEST(TasepStepDirect, SuppressedAndAllowedMoves) {
  const Window w{-2, 3};
  const auto c = make_config(w, {{1, 2}});
  auto s = tasep_from_zrp(c);
  const auto before = s;
  tasep_step_direct(s, 0);  // gap omega_0 = 0: blocked
  EXPECT_EQ(s, before);
  tasep_step_direct(s, 1);  // gap 2: moves left
  EXPECT_EQ(s.positions[w.index(1)], 2);
  const auto gaps = tasep_gaps(s);
  EXPECT_EQ(gaps[static_cast<std::size_t>(1 - w.lo - 1)], 1);
  EXPECT_EQ(gaps[static_cast<std::size_t>(2 - w.lo - 1)], 1);
  EXPECT_THROW(tasep_step_direct(s, 9), std::domain_error);
}

TEST(TasepStepDirect, MatchesMappedZrpUnderSharedClocks) {
  const Window w{-24, 25};
  for (std::uint64_t r = 0; r < 20; ++r) {
    Configuration c(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      c.set(i, static_cast<std::int32_t>(
                   sample_via_quantile(Law::geometric(Density(1.0)), site_uniform(5, r, i))));
    }
    auto direct = tasep_from_zrp(c);
    CoupledEnsemble zrp({c}, {}, ClockStream(5, r));
    for (const auto& ring : per_site_rings(w, 20.0, 5, r)) {
      zrp.apply_ring(ring.site);
      tasep_step_direct(direct, ring.site);
      ASSERT_EQ(tasep_view(zrp, 0), direct.positions);
    }
  }
}
