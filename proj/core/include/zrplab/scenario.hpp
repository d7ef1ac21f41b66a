#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace zrplab {

using Site = std::int64_t;

/// i.i.d. geometric occupations with mean rho.
struct Stationary {
  double rho = 1.0;
};
/// (omega-, omega) with a mu_hat origin in omega- and an antiparticle at 0.
struct MuHatPair {
  double rho = 1.0;
};
/// (eta, omega-, omega) coupled sitewise; labels on omega - eta.
struct ThreeProcess {
  double rho = 1.0;
  double lambda = 0.5;
};
/// (eta, xi, zeta) with the lambda-density segment (-n, 0] and a second
/// class particle on eta started at -n.
struct Segment {
  double rho = 1.0;
  double lambda = 0.8;
  std::int64_t u = 5;
};

using ScenarioKind = std::variant<Stationary, MuHatPair, ThreeProcess, Segment>;

std::string scenario_name(const ScenarioKind& kind);

enum class ClockMode {
  race,      // exponential race over the active set
  per_site,  // one site-keyed rate-1 Poisson clock per site
};

struct ScenarioSpec {
  ScenarioKind kind = MuHatPair{};
  double horizon = 0.0;
  std::vector<double> checkpoints;  // sorted, in (0, horizon]
  std::vector<double> observers;    // observer speeds V
  std::uint64_t seed = 1;
  double margin_factor = 1.0;
  bool snapshots = false;     // record full occupancies at t = 0 and checkpoints
  bool audit_events = false;  // local ordering check after every event
  ClockMode clock = ClockMode::race;
  std::size_t max_window_sites = std::size_t{1} << 26;
};

/// Throws ConfigError for inconsistent parameters.
void validate(const ScenarioSpec& spec);

struct Window {
  Site lo = 0;
  Site hi = 0;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(hi - lo + 1); }
  [[nodiscard]] bool contains(Site i) const noexcept { return i >= lo && i <= hi; }
  [[nodiscard]] std::size_t index(Site i) const noexcept { return static_cast<std::size_t>(i - lo); }
  friend bool operator==(const Window&, const Window&) = default;
};

/// ceil(T + margin * (12 sqrt(T) + 50)) on both sides; Segment scenarios shift
/// the left edge by the segment length n. Throws ResourceError above the cap.
Window build_window(const ScenarioSpec& spec);

/// Segment length n = [V^lambda T] - [V^rho T] + u.
std::int64_t segment_length(double rho, double lambda, std::int64_t u, double horizon);

}  // namespace zrplab
