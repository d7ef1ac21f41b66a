#include "zrplab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zrplab/errors.hpp"
#include "zrplab/observables.hpp"

namespace zrplab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_density(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be a finite nonnegative density");
  }
}

void require_ordered(double lambda, double rho) {
  require_density(lambda, "lambda");
  require_density(rho, "rho");
  if (lambda > rho) {
    throw ConfigError("lambda must not exceed rho");
  }
}

}  // namespace

std::string scenario_name(const ScenarioKind& kind) {
  return std::visit(overloaded{[](const Stationary&) { return std::string("stationary"); },
                               [](const MuHatPair&) { return std::string("muhat"); },
                               [](const ThreeProcess&) { return std::string("three"); },
                               [](const Segment&) { return std::string("segment"); }},
                    kind);
}

std::int64_t segment_length(double rho, double lambda, std::int64_t u, double horizon) {
  return int_toward_zero(characteristic_speed(lambda) * horizon) -
         int_toward_zero(characteristic_speed(rho) * horizon) + u;
}

void validate(const ScenarioSpec& spec) {
  std::visit(overloaded{[](const Stationary& s) { require_density(s.rho, "rho"); },
                        [](const MuHatPair& s) { require_density(s.rho, "rho"); },
                        [](const ThreeProcess& s) { require_ordered(s.lambda, s.rho); },
                        [](const Segment& s) {
                          require_ordered(s.lambda, s.rho);
                          if (s.u < 1) {
                            throw ConfigError("segment offset u must be a positive integer");
                          }
                        }},
             spec.kind);
  if (!(spec.horizon >= 0.0) || !std::isfinite(spec.horizon)) {
    throw ConfigError("horizon must be finite and nonnegative");
  }
  if (!(spec.margin_factor >= 1.0) || !std::isfinite(spec.margin_factor)) {
    throw ConfigError("margin factor must be at least 1");
  }
  if (!std::is_sorted(spec.checkpoints.begin(), spec.checkpoints.end())) {
    throw ConfigError("checkpoints must be sorted");
  }
  for (double t : spec.checkpoints) {
    if (!(t > 0.0) || t > spec.horizon) {
      throw ConfigError("checkpoints must lie in (0, horizon]");
    }
  }
  for (double v : spec.observers) {
    if (!std::isfinite(v)) {
      throw ConfigError("observer speeds must be finite");
    }
  }
}

Window build_window(const ScenarioSpec& spec) {
  const double t = spec.horizon;
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ConfigError("horizon must be finite and nonnegative");
  }
  const double reach = std::ceil(t + spec.margin_factor * (12.0 * std::sqrt(t) + 50.0));
  const auto half = static_cast<Site>(reach);
  Site offset = 0;
  if (const auto* seg = std::get_if<Segment>(&spec.kind)) {
    offset = segment_length(seg->rho, seg->lambda, seg->u, t);
  }
  Window w{-half - offset, half};
  if (w.size() > spec.max_window_sites) {
    throw ResourceError("window of " + std::to_string(w.size()) + " sites exceeds the cap of " +
                        std::to_string(spec.max_window_sites));
  }
  return w;
}

}  // namespace zrplab
