#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "zrplab/engine.hpp"
#include "zrplab/errors.hpp"
#include "zrplab/scenario.hpp"
#include "zrplab/stats.hpp"

namespace zrplab {

inline constexpr double kDefaultZThreshold = 4.0;

struct ExperimentOptions {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  double margin_factor = 1.0;
  ClockMode clock = ClockMode::race;
};

/// Per-replica values in replica-index order; aborted replicas are counted
/// and left out.
template <class T>
struct ReplicaResults {
  std::vector<T> values;
  std::size_t replicas = 0;
  std::size_t aborted = 0;

  [[nodiscard]] bool valid() const noexcept { return aborted == 0; }
};

/// Calls fn(replica) for replica = 0 .. replicas-1 on up to `workers`
/// threads. Each replica is confined to one worker; results are gathered by
/// replica index so the merge order never depends on scheduling.
template <class Fn>
auto map_replicas(std::size_t replicas, std::size_t workers, Fn fn)
    -> ReplicaResults<std::invoke_result_t<Fn&, std::uint64_t>> {
  using T = std::invoke_result_t<Fn&, std::uint64_t>;
  std::vector<std::optional<T>> slots(replicas);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < replicas; r += stride) {
      try {
        slots[r].emplace(fn(static_cast<std::uint64_t>(r)));
      } catch (const TruncationRisk&) {
        // counted below
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, replicas));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work, w, workers);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  ReplicaResults<T> out;
  out.replicas = replicas;
  out.values.reserve(replicas);
  for (auto& s : slots) {
    if (s) {
      out.values.push_back(std::move(*s));
    } else {
      ++out.aborted;
    }
  }
  return out;
}

using EnsembleRun = ReplicaResults<ObservationLog>;

/// Independent replicas of one scenario with seeds derived from
/// (spec.seed, replica index).
EnsembleRun run_ensemble(const ScenarioSpec& spec, std::size_t replicas, std::size_t workers = 1);

struct IdentityReport {
  std::string name;
  Estimate lhs;
  Estimate rhs;
  double z = 0.0;
  bool pass = false;
};

IdentityReport make_report(std::string name, const Estimate& lhs, const Estimate& rhs,
                           double threshold = kDefaultZThreshold);

struct MomentEntry {
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
};

struct MomentSeries {
  double m = 1.0;
  std::vector<MomentEntry> entries;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Least squares of log(estimate) on log(t); slope error by the delta method
/// from the entry errors. Needs >= 4 distinct positive t and positive
/// estimates, else std::domain_error.
ExponentFit fit_exponent(const MomentSeries& series);

// ---------------------------------------------------------------------------
// Exact identities

struct IdentityRun {
  std::vector<IdentityReport> reports;
  std::size_t replicas = 0;
  std::size_t aborted = 0;
};

/// For every speed V: (a) Var(J^(V)(t)) from stationary runs against
/// rho(1+rho) E|[Vt] - Q_a(t)| from mu_hat pair runs, (b) mean current
/// against rho t/(1+rho) - rho [Vt]; then (c) mean Q_a(t) against
/// t/(1+rho)^2.
IdentityRun verify_identities(double rho, const std::vector<double>& speeds, double t,
                              std::size_t replicas, const ExperimentOptions& opts = {});

struct TwoPointResult {
  std::vector<std::int64_t> sites;
  std::vector<IdentityReport> per_site;  // S(i,t) against rho(1+rho) P(Q_a(t) = i)
  IdentityReport sum_rule;               // sum_i S(i,t) = rho(1+rho)
  IdentityReport first_moment;           // sum_i i S(i,t) = rho(1+rho) V^rho t
  std::size_t samples = 0;
  std::size_t aborted = 0;
};

/// Averaging range [j_lo, j_hi] of the two-point estimator: clear of the
/// left edge by t + 12 sqrt(t) + site_range, of the right edge by site_range.
std::pair<Site, Site> two_point_interior(double rho, double t, std::int64_t site_range,
                                         double margin_factor);

/// Two-point function by translation averaging over the interior of one long
/// stationary window per replica. `site_range` must cover t + 12 sqrt(t).
/// An explicit interior keeps the averaging range fixed across windows.
TwoPointResult two_point_check(double rho, double t, std::int64_t site_range, std::size_t samples,
                               const ExperimentOptions& opts,
                               std::optional<std::pair<Site, Site>> interior = std::nullopt);

// ---------------------------------------------------------------------------
// Scaling

/// Q_a(t) samples of mu_hat pair runs at every t of the grid.
struct DefectSamples {
  double rho = 1.0;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> positions;  // [t index][replica]
  std::size_t replicas = 0;
  std::size_t aborted = 0;
};

DefectSamples defect_samples(double rho, const std::vector<double>& t_grid, std::size_t replicas,
                             const ExperimentOptions& opts = {});

/// E|Q_a(t) - [V^rho t]|^m per t. Throws std::domain_error unless 1 <= m < 3.
MomentSeries moment_series(const DefectSamples& samples, double m);
MomentSeries moment_series(double rho, double m, const std::vector<double>& t_grid,
                           std::size_t replicas, const ExperimentOptions& opts = {});

struct DiffusivitySeries {
  MomentSeries variance;     // m = 2, centered by the sample mean
  MomentSeries diffusivity;  // D(t) = Var(Q_a(t)) / t
};

DiffusivitySeries diffusivity_series(const DefectSamples& samples);

// ---------------------------------------------------------------------------
// Off-characteristic fluctuations

struct OffcharResult {
  double speed = 0.0;
  IdentityReport variance;  // Var(J)/t against rho(1+rho)|V^rho - V|
  double relative_error = 0.0;
  double ks = 0.0;      // lattice continuity-corrected
  double ks_raw = 0.0;  // plain, no correction
  std::size_t replicas = 0;
  std::size_t aborted = 0;
};

/// One result per speed, all from the same stationary runs. Throws
/// std::domain_error when a speed is within `min_gap` of V^rho.
std::vector<OffcharResult> offchar_suite(double rho, const std::vector<double>& speeds, double t,
                                         std::size_t replicas, const ExperimentOptions& opts = {},
                                         double min_gap = 0.2);

// ---------------------------------------------------------------------------
// Pathwise statements

struct Lemma41Result {
  std::size_t replicas = 0;
  std::size_t applicable = 0;  // replicas with Q^(-n)(t) <= [Vt]
  std::size_t violations = 0;  // of those, J^zeta - J^eta > 0
  std::size_t audit_violations = 0;
  std::size_t aborted = 0;
};

/// With `desynchronize` the zeta process is driven by its own clock stream
/// (negative control; the implication is then expected to fail).
Lemma41Result lemma41_pathwise(double rho, double lambda, std::int64_t u, double speed, double t,
                               std::size_t replicas, const ExperimentOptions& opts = {},
                               bool desynchronize = false);

struct TaggedParticleResult {
  double alpha = 0.5;
  MomentSeries variance;                  // Var(R^E_[alpha^2 t](t))
  std::vector<Estimate> mean_offset;      // E R^E - (2 alpha - 1) t, per t
  std::vector<Estimate> current_variance; // Var(J^rho(t)), per t
  std::size_t replicas = 0;
  std::size_t aborted = 0;
};

TaggedParticleResult tagged_particle_suite(double alpha, const std::vector<double>& t_grid,
                                           std::size_t replicas,
                                           const ExperimentOptions& opts = {});

struct TasepCheck {
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;
};

/// Direct TASEP and mapped ZRP driven by the same per-site clocks; compares
/// R_k(t) with -h_k(t) + k for every particle at every checkpoint.
TasepCheck tasep_bijection_check(double rho, std::size_t particles, double horizon,
                                 const std::vector<double>& checkpoints, std::size_t replicas,
                                 std::uint64_t seed);

struct AuditResult {
  std::map<std::string, std::size_t> replicas;     // per scenario
  std::map<std::string, std::size_t> violations;   // per "scenario/kind"
  std::size_t aborted = 0;
  [[nodiscard]] std::size_t total_violations() const;
};

/// Runs every scenario type with the per-event order check and a full audit
/// at each checkpoint.
AuditResult coupling_audit(double t, std::size_t replicas, const ExperimentOptions& opts = {});

struct TruncationCheck {
  std::string name;
  Estimate base;
  Estimate doubled;
  bool pass = false;  // |doubled - base| < base std_error
};

struct TruncationAuditConfig {
  std::size_t replicas = 2000;          // identities
  std::size_t two_point_samples = 4000; // two-point sum rules
  double two_point_margin = 4.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

/// Re-estimates the mean current, defect speed, variance identity and
/// two-point sum rules with the margin factor doubled, using site-keyed
/// clocks so both windows share their randomness on the overlap.
std::vector<TruncationCheck> truncation_audit(const TruncationAuditConfig& config);

}  // namespace zrplab
