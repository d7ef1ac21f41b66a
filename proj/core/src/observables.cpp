#include "zrplab/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "zrplab/engine.hpp"
#include "zrplab/errors.hpp"

namespace zrplab {

std::int64_t int_toward_zero(double x) {
  return static_cast<std::int64_t>(x >= 0.0 ? std::floor(x) : std::ceil(x));
}

ModelConstants model_constants(Density rho) {
  const double r = rho.value();
  return {hydrodynamic_flux(r), characteristic_speed(r), r * (1.0 + r)};
}

std::int64_t initial_height(const Configuration& config, Site i) {
  const Window w = config.window;
  if (!w.contains(i)) {
    throw std::domain_error("site " + std::to_string(i) + " outside the window");
  }
  std::int64_t h = 0;
  if (i < 0) {
    for (Site j = i + 1; j <= 0; ++j) {
      h += config.counts[w.index(j)];
    }
  } else {
    for (Site j = 1; j <= i; ++j) {
      h -= config.counts[w.index(j)];
    }
  }
  return h;
}

HeightLedger::HeightLedger(const Configuration& initial)
    : window_(initial.window), heights_(initial.window.size(), 0) {
  const Window w = window_;
  if (!w.contains(0)) {
    throw std::domain_error("height ledger needs the origin inside the window");
  }
  for (Site i = -1; i >= w.lo; --i) {
    heights_[w.index(i)] = heights_[w.index(i + 1)] + initial.counts[w.index(i + 1)];
  }
  for (Site i = 1; i <= w.hi; ++i) {
    heights_[w.index(i)] = heights_[w.index(i - 1)] - initial.counts[w.index(i)];
  }
  right_mass_ = initial.sink_count - heights_[w.index(w.hi)];
}

std::int64_t HeightLedger::at(Site i) const {
  if (!window_.contains(i)) {
    throw std::domain_error("height at site " + std::to_string(i) + " is not tracked");
  }
  return heights_[window_.index(i)];
}

std::int64_t height_from_counts(const Configuration& now, std::int64_t initial_right_mass, Site i) {
  const Window w = now.window;
  if (!w.contains(i)) {
    throw std::domain_error("site " + std::to_string(i) + " outside the window");
  }
  std::int64_t right = now.sink_count;
  for (Site j = i + 1; j <= w.hi; ++j) {
    right += now.counts[w.index(j)];
  }
  return right - initial_right_mass;
}

CurrentSample current_at(const CoupledEnsemble& ensemble, std::size_t config, double speed,
                         double time) {
  const Site bond = int_toward_zero(speed * time);
  const Window w = ensemble.window();
  if (!w.contains(bond)) {
    throw std::domain_error("bond " + std::to_string(bond) + " is not tracked");
  }
  const auto value = ensemble.heights(config).at(bond) + ensemble.bond_counts(config)[w.index(bond)];
  return {speed, time, value};
}

std::int64_t count_interval_defects(const Configuration& lower, const Configuration& upper, Site j,
                                    std::int64_t u) {
  if (u < 1) {
    throw std::domain_error("interval half-length u must be positive");
  }
  const Window w = lower.window;
  const Site first = j + 1;
  const Site last = j + 2 * u - 1;
  if (!(upper.window == w) || !w.contains(first) || !w.contains(last)) {
    throw std::domain_error("interval leaves the window");
  }
  std::int64_t n = 0;
  for (Site i = first; i <= last; ++i) {
    n += upper.counts[w.index(i)] - lower.counts[w.index(i)];
  }
  return n;
}

std::vector<Site> tasep_view(const CoupledEnsemble& ensemble, std::size_t config) {
  const Window w = ensemble.window();
  const auto& ledger = ensemble.heights(config);
  const auto bonds = ensemble.bond_counts(config);
  std::vector<Site> out;
  out.reserve(w.size());
  for (Site k = w.lo; k <= w.hi; ++k) {
    out.push_back(tasep_view(ledger.at(k) + bonds[w.index(k)], k));
  }
  return out;
}

TasepState tasep_from_zrp(const Configuration& initial) {
  const Window w = initial.window;
  if (!w.contains(0)) {
    throw std::domain_error("the tagged particle 0 must be inside the window");
  }
  TasepState s;
  s.first_label = w.lo;
  s.positions.assign(w.size(), 0);
  for (Site k = 1; k <= w.hi; ++k) {
    s.positions[w.index(k)] = s.positions[w.index(k - 1)] + initial.counts[w.index(k)] + 1;
  }
  for (Site k = -1; k >= w.lo; --k) {
    s.positions[w.index(k)] = s.positions[w.index(k + 1)] - initial.counts[w.index(k + 1)] - 1;
  }
  s.wall = s.positions.front() - initial.counts.front() - 1;
  return s;
}

void tasep_step_direct(TasepState& state, std::int64_t k) {
  const auto idx = k - state.first_label;
  if (idx < 0 || idx >= static_cast<std::int64_t>(state.positions.size())) {
    throw std::domain_error("particle label outside the tracked range");
  }
  const auto i = static_cast<std::size_t>(idx);
  const Site left = i == 0 ? state.wall : state.positions[i - 1];
  Site& r = state.positions[i];
  if (left >= r) {
    throw InvariantViolation("exclusion order broken at particle " + std::to_string(k));
  }
  if (left < r - 1) {
    --r;
  }
}

std::vector<std::int64_t> tasep_gaps(const TasepState& state) {
  std::vector<std::int64_t> gaps;
  for (std::size_t i = 1; i < state.positions.size(); ++i) {
    gaps.push_back(state.positions[i] - state.positions[i - 1] - 1);
  }
  return gaps;
}

}  // namespace zrplab
