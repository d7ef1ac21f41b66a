#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "zrplab/configuration.hpp"
#include "zrplab/measures.hpp"

namespace zrplab {

class CoupledEnsemble;

/// The first integer from x towards the origin.
std::int64_t int_toward_zero(double x);

struct ModelConstants {
  double flux = 0.0;                  // rho / (1 + rho)
  double characteristic_speed = 1.0;  // 1 / (1 + rho)^2
  double variance = 0.0;              // rho (1 + rho)
};

ModelConstants model_constants(Density rho);
inline double characteristic_speed(double rho) { return 1.0 / ((1.0 + rho) * (1.0 + rho)); }
inline double hydrodynamic_flux(double rho) { return rho / (1.0 + rho); }

/// Initial height of the column over [i, i + 1] with h_0(0) = 0. Direct sum,
/// O(|i|). Throws std::domain_error outside the window.
std::int64_t initial_height(const Configuration& config, Site i);

/// Precomputed initial heights of one configuration.
class HeightLedger {
 public:
  HeightLedger() = default;
  explicit HeightLedger(const Configuration& initial);

  /// Throws std::domain_error outside the window.
  [[nodiscard]] std::int64_t at(Site i) const;
  /// Particles strictly right of 0 at time 0.
  [[nodiscard]] std::int64_t initial_right_mass() const noexcept { return right_mass_; }
  [[nodiscard]] Window window() const noexcept { return window_; }

  friend bool operator==(const HeightLedger&, const HeightLedger&) = default;

 private:
  Window window_;
  std::vector<std::int64_t> heights_;
  std::int64_t right_mass_ = 0;
};

/// h_i(t) recounted from the current occupancies: particles right of i
/// (sink included) minus the initial mass right of 0.
std::int64_t height_from_counts(const Configuration& now, std::int64_t initial_right_mass, Site i);

struct CurrentSample {
  double speed = 0.0;
  double time = 0.0;
  std::int64_t value = 0;
};

/// J^(V)(t) = h_[Vt](0) + bond count at [Vt], read from the current state.
CurrentSample current_at(const CoupledEnsemble& ensemble, std::size_t config, double speed,
                         double time);

/// Sum of upper - lower over sites j+1 .. j+2u-1.
std::int64_t count_interval_defects(const Configuration& lower, const Configuration& upper, Site j,
                                    std::int64_t u);

/// TASEP view of the height profile: R_k = -h_k + k.
constexpr Site tasep_view(std::int64_t height_k, std::int64_t k) noexcept { return -height_k + k; }

/// Tagged TASEP positions for every label k in the window of `config`.
std::vector<Site> tasep_view(const CoupledEnsemble& ensemble, std::size_t config);

/// Exclusion particles labeled by the ZRP sites of a window; particles jump
/// left. The particle below the first label is frozen (no injection from the
/// left of the window).
struct TasepState {
  std::int64_t first_label = 0;
  std::vector<Site> positions;  // positions[k - first_label] = R_k
  Site wall = 0;

  friend bool operator==(const TasepState&, const TasepState&) = default;
};

/// Gap bijection with R_0 = 0: R_k - R_{k-1} - 1 = omega_k.
TasepState tasep_from_zrp(const Configuration& initial);

/// Particle k moves one site left iff that site is empty.
void tasep_step_direct(TasepState& state, std::int64_t k);

/// omega_i = R_i - R_{i-1} - 1 for every label but the first.
std::vector<std::int64_t> tasep_gaps(const TasepState& state);

inline double tasep_rho_from_alpha(double alpha) { return 1.0 / alpha - 1.0; }

}  // namespace zrplab
