#pragma once

#include <cstdint>
#include <vector>

#include "zrplab/scenario.hpp"

namespace zrplab {

/// Occupancy counts over a finite window. Particles that jump off the right
/// edge are kept in `sink_count`; nothing enters from the left.
struct Configuration {
  Window window;
  std::vector<std::int32_t> counts;  // counts[i - window.lo]
  std::int64_t sink_count = 0;

  Configuration() = default;
  explicit Configuration(Window w) : window(w), counts(w.size(), 0) {}

  /// Throws std::domain_error outside the window.
  [[nodiscard]] std::int32_t at(Site i) const;
  void set(Site i, std::int32_t value);

  [[nodiscard]] std::int64_t particles() const;
  /// Particles in the window plus the sink.
  [[nodiscard]] std::int64_t total() const { return particles() + sink_count; }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Pointwise lo <= hi, sink included.
bool pointwise_le(const Configuration& lo, const Configuration& hi);

}  // namespace zrplab
