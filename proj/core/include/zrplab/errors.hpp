#pragma once

#include <stdexcept>

namespace zrplab {

/// Inconsistent scenario or coupling parameters (e.g. lambda > rho).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested lattice window exceeds the memory cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tracked defect came too close to the right edge of the window; the
/// replica is discarded and counted by the caller.
class TruncationRisk : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant of the coupled dynamics was broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace zrplab
