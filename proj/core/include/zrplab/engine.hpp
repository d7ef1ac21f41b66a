#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zrplab/configuration.hpp"
#include "zrplab/defects.hpp"
#include "zrplab/observables.hpp"
#include "zrplab/rng.hpp"
#include "zrplab/scenario.hpp"

namespace zrplab {

inline constexpr std::size_t kMaxConfigs = 4;

struct Ring {
  double time = 0.0;
  Site site = 0;
};

struct CheckpointRecord {
  double time = 0.0;
  std::vector<Site> defects;                         // single defect positions
  std::vector<Site> anchors;                         // label 0 per family, or kNoSite
  std::vector<std::int64_t> label_counts;            // per family
  std::vector<std::vector<std::int64_t>> currents;   // [config][observer]
  std::vector<std::vector<std::int64_t>> bonds;      // [config][observer]
  std::vector<std::vector<std::int32_t>> occupancy;  // [config], when requested
  std::size_t violations = 0;

  friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

/// records[0] is the initial state; one record per checkpoint follows.
struct ObservationLog {
  Window window;
  std::vector<std::string> defect_names;
  std::vector<CheckpointRecord> records;
  std::uint64_t events = 0;

  friend bool operator==(const ObservationLog&, const ObservationLog&) = default;
};

/// One to four pointwise ordered configurations driven by shared clocks,
/// with bond counters and the defect registries attached to them.
class CoupledEnsemble {
 public:
  CoupledEnsemble(std::vector<Configuration> configs, DefectSet defects, ClockStream clock,
                  double margin_factor = 1.0);

  [[nodiscard]] Window window() const noexcept { return window_; }
  [[nodiscard]] std::size_t num_configs() const noexcept { return configs_.size(); }
  [[nodiscard]] const Configuration& config(std::size_t c) const { return configs_.at(c); }
  [[nodiscard]] std::span<const std::int64_t> bond_counts(std::size_t c) const {
    return bonds_.at(c);
  }
  [[nodiscard]] const HeightLedger& heights(std::size_t c) const { return ledgers_.at(c); }
  [[nodiscard]] std::int64_t initial_total(std::size_t c) const { return initial_totals_.at(c); }
  [[nodiscard]] const DefectSet& defects() const noexcept { return defects_; }
  [[nodiscard]] double now() const noexcept { return now_; }
  [[nodiscard]] ClockStream& clock() noexcept { return clock_; }
  [[nodiscard]] std::uint64_t events() const noexcept { return events_; }

  /// Sites where a ring can change anything: the maximal configuration is
  /// occupied or a virtual defect sits there.
  [[nodiscard]] std::size_t active_count() const noexcept { return active_.size(); }
  [[nodiscard]] bool is_active(Site i) const;

  /// Next ring of the exponential race over the active set; advances now().
  /// Empty when no site is active or the next ring falls after `limit`, in
  /// which case now() becomes `limit`.
  std::optional<Ring> next_ring(double limit = std::numeric_limits<double>::infinity());

  /// Applies a clock ring at site i to every configuration and moves defects.
  void apply_ring(Site i);

  /// Moves the clock forward without an event (external ring sources).
  void advance_to(double t);

  /// Replaces the event stream, e.g. to desynchronize a copy.
  void reseed_clock(std::uint64_t salt);

  /// Local order check at i and i + 1 after every event; throws
  /// InvariantViolation.
  void set_event_audit(bool on) noexcept { event_audit_ = on; }

  /// Set when a tracked defect entered the guard band near window.hi.
  [[nodiscard]] bool truncation_risk() const noexcept { return truncation_risk_; }
  [[nodiscard]] Site guard_site() const noexcept { return guard_site_; }

 private:
  void refresh_active(std::size_t idx);
  void check_local_order(std::size_t idx) const;

  Window window_;
  std::vector<Configuration> configs_;
  std::vector<std::vector<std::int64_t>> bonds_;
  std::vector<HeightLedger> ledgers_;
  std::vector<std::int64_t> initial_totals_;
  DefectSet defects_;
  ClockStream clock_;
  double now_ = 0.0;
  std::uint64_t events_ = 0;

  std::vector<std::int32_t> active_;       // active site indices
  std::vector<std::int32_t> active_slot_;  // per site index, -1 when inactive
  std::vector<std::int32_t> virtual_here_; // virtual defects per site index

  Site guard_site_ = 0;
  bool truncation_risk_ = false;
  bool event_audit_ = false;
};

/// Samples the initial coupled state of a scenario for one replica.
CoupledEnsemble init_scenario(const ScenarioSpec& spec, std::uint64_t replica = 0);

/// Runs to the horizon with the clock mode of the spec, recording the
/// initial state and every checkpoint. Throws TruncationRisk.
ObservationLog run(CoupledEnsemble& ensemble, const ScenarioSpec& spec);

/// Runs from an explicit clock realization. With `skip_inactive` rings at
/// inactive sites are dropped before they reach apply_ring.
ObservationLog run_rings(CoupledEnsemble& ensemble, const ScenarioSpec& spec,
                         std::span<const Ring> rings, bool skip_inactive);

/// Explicit realization of independent rate-1 Poisson clocks on every site
/// of the window up to the horizon, merged in time order. Site-keyed.
std::vector<Ring> per_site_rings(Window window, double horizon, std::uint64_t seed,
                                 std::uint64_t replica);

/// Snapshot of the observables at the ensemble's current state.
CheckpointRecord record_state(const CoupledEnsemble& ensemble, const ScenarioSpec& spec,
                              double time);

}  // namespace zrplab
