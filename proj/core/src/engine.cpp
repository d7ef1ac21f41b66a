#include "zrplab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "zrplab/errors.hpp"
#include "zrplab/measures.hpp"

namespace zrplab {

std::int32_t Configuration::at(Site i) const {
  if (!window.contains(i)) {
    throw std::domain_error("site " + std::to_string(i) + " outside the window");
  }
  return counts[window.index(i)];
}

void Configuration::set(Site i, std::int32_t value) {
  if (!window.contains(i)) {
    throw std::domain_error("site " + std::to_string(i) + " outside the window");
  }
  if (value < 0) {
    throw std::domain_error("occupancy must be nonnegative");
  }
  counts[window.index(i)] = value;
}

std::int64_t Configuration::particles() const {
  std::int64_t n = 0;
  for (auto c : counts) {
    n += c;
  }
  return n;
}

bool pointwise_le(const Configuration& lo, const Configuration& hi) {
  if (!(lo.window == hi.window) || lo.sink_count > hi.sink_count) {
    return false;
  }
  for (std::size_t k = 0; k < lo.counts.size(); ++k) {
    if (lo.counts[k] > hi.counts[k]) {
      return false;
    }
  }
  return true;
}

CoupledEnsemble::CoupledEnsemble(std::vector<Configuration> configs, DefectSet defects,
                                 ClockStream clock, double margin_factor)
    : configs_(std::move(configs)), defects_(std::move(defects)), clock_(std::move(clock)) {
  if (configs_.empty() || configs_.size() > kMaxConfigs) {
    throw ConfigError("an ensemble holds between 1 and " + std::to_string(kMaxConfigs) +
                      " configurations");
  }
  window_ = configs_.front().window;
  if (!window_.contains(0)) {
    throw ConfigError("the window must contain the origin");
  }
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    if (!(configs_[c].window == window_)) {
      throw ConfigError("coupled configurations must share one window");
    }
    if (c > 0 && !pointwise_le(configs_[c - 1], configs_[c])) {
      throw ConfigError("coupled configurations must be pointwise ordered");
    }
    bonds_.emplace_back(window_.size(), 0);
    ledgers_.emplace_back(configs_[c]);
    initial_totals_.push_back(configs_[c].total());
  }

  const std::size_t n = window_.size();
  virtual_here_.assign(n, 0);
  for (const auto& d : defects_.singles) {
    if (!window_.contains(d.position) || d.lower >= configs_.size() ||
        (d.upper && *d.upper >= configs_.size())) {
      throw ConfigError("defect " + d.id + " does not fit the ensemble");
    }
    if (!d.upper) {
      ++virtual_here_[window_.index(d.position)];
    }
  }
  for (const auto& f : defects_.families) {
    if (f.lower() >= configs_.size() || f.upper() >= configs_.size()) {
      throw ConfigError("label family " + f.id() + " does not fit the ensemble");
    }
  }

  active_slot_.assign(n, -1);
  active_.reserve(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    refresh_active(idx);
  }
  guard_site_ = window_.hi - static_cast<Site>(std::floor(10.0 * margin_factor));
}

bool CoupledEnsemble::is_active(Site i) const {
  return window_.contains(i) && active_slot_[window_.index(i)] >= 0;
}

void CoupledEnsemble::refresh_active(std::size_t idx) {
  const bool should = configs_.back().counts[idx] > 0 || virtual_here_[idx] > 0;
  auto& slot = active_slot_[idx];
  if (should && slot < 0) {
    slot = static_cast<std::int32_t>(active_.size());
    active_.push_back(static_cast<std::int32_t>(idx));
  } else if (!should && slot >= 0) {
    const auto moved = active_.back();
    active_[static_cast<std::size_t>(slot)] = moved;
    active_slot_[static_cast<std::size_t>(moved)] = slot;
    active_.pop_back();
    slot = -1;
  }
}

std::optional<Ring> CoupledEnsemble::next_ring(double limit) {
  if (active_.empty()) {
    now_ = std::max(now_, std::isfinite(limit) ? limit : now_);
    return std::nullopt;
  }
  const double t = now_ + clock_.exponential(static_cast<double>(active_.size()));
  if (t > limit) {
    now_ = limit;
    return std::nullopt;
  }
  now_ = t;
  const auto idx = active_[clock_.index(active_.size())];
  return Ring{t, window_.lo + idx};
}

void CoupledEnsemble::advance_to(double t) {
  if (t < now_) {
    throw std::invalid_argument("clock cannot move backwards");
  }
  now_ = t;
}

void CoupledEnsemble::reseed_clock(std::uint64_t salt) {
  clock_ = ClockStream(clock_.seed(), clock_.replica(), salt);
}

void CoupledEnsemble::apply_ring(Site i) {
  if (!window_.contains(i)) {
    throw std::domain_error("ring outside the window");
  }
  const std::size_t idx = window_.index(i);
  const bool at_edge = idx + 1 == window_.size();

  std::array<bool, kMaxConfigs> jumped{};
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    auto& counts = configs_[c].counts;
    if (counts[idx] > 0) {
      jumped[c] = true;
      --counts[idx];
      if (at_edge) {
        ++configs_[c].sink_count;
      } else {
        ++counts[idx + 1];
      }
      ++bonds_[c][idx];
    }
  }

  for (auto& d : defects_.singles) {
    if (d.position != i) {
      continue;
    }
    const bool upper_jumped = d.upper ? jumped[*d.upper] : true;
    if (on_config_jump(d, i, jumped[d.lower], upper_jumped)) {
      if (!d.upper) {
        --virtual_here_[idx];
        if (!at_edge) {
          ++virtual_here_[idx + 1];
        }
      }
      truncation_risk_ = truncation_risk_ || d.position >= guard_site_;
    }
  }
  for (auto& f : defects_.families) {
    if (const auto moved = on_config_jump(f, i, jumped[f.lower()], jumped[f.upper()])) {
      truncation_risk_ = truncation_risk_ || (*moved == 0 && i + 1 >= guard_site_);
    }
  }

  refresh_active(idx);
  if (!at_edge) {
    refresh_active(idx + 1);
  }
  if (event_audit_) {
    check_local_order(idx);
  }
  ++events_;
}

void CoupledEnsemble::check_local_order(std::size_t idx) const {
  const bool at_edge = idx + 1 == window_.size();
  for (std::size_t c = 0; c + 1 < configs_.size(); ++c) {
    const auto& lo = configs_[c];
    const auto& hi = configs_[c + 1];
    bool ok = lo.counts[idx] <= hi.counts[idx];
    ok = ok && (at_edge ? lo.sink_count <= hi.sink_count : lo.counts[idx + 1] <= hi.counts[idx + 1]);
    if (!ok) {
      throw InvariantViolation("attractivity broken at site " +
                               std::to_string(window_.lo + static_cast<Site>(idx)));
    }
  }
}

namespace {

double u_at(const ScenarioSpec& spec, std::uint64_t replica, Site i) {
  return site_uniform(spec.seed, replica, i);
}

Configuration plus_delta(Configuration c, Site i) {
  c.counts[c.window.index(i)] += 1;
  return c;
}

struct Builder {
  const ScenarioSpec& spec;
  std::uint64_t replica;
  Window w;

  CoupledEnsemble operator()(const Stationary& s) const {
    const auto law = Law::geometric(Density(s.rho));
    Configuration omega(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      omega.counts[w.index(i)] = static_cast<std::int32_t>(sample_via_quantile(law, u_at(spec, replica, i)));
    }
    return make({std::move(omega)}, {});
  }

  CoupledEnsemble operator()(const MuHatPair& s) const {
    const Density rho(s.rho);
    Configuration minus(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      const auto law = i == 0 ? Law::mu_hat(rho) : Law::geometric(rho);
      minus.counts[w.index(i)] = static_cast<std::int32_t>(sample_via_quantile(law, u_at(spec, replica, i)));
    }
    auto omega = plus_delta(minus, 0);
    DefectSet defects;
    defects.singles.push_back({"Q_a", 0, 1, 0});
    return make({std::move(minus), std::move(omega)}, std::move(defects));
  }

  CoupledEnsemble operator()(const ThreeProcess& s) const {
    const Density rho(s.rho);
    const Density lambda(s.lambda);
    Configuration eta(w);
    Configuration minus(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      const auto [lo, hi] =
          i == 0 ? couple_monotone(Law::mu_hat(lambda), Law::mu_hat(rho), u_at(spec, replica, i))
                 : couple_monotone(Law::geometric(lambda), Law::geometric(rho), u_at(spec, replica, i));
      eta.counts[w.index(i)] = static_cast<std::int32_t>(lo);
      minus.counts[w.index(i)] = static_cast<std::int32_t>(hi);
    }
    auto omega = plus_delta(minus, 0);
    DefectSet defects;
    defects.singles.push_back({"Q_a", 1, 2, 0});
    defects.singles.push_back({"Q^lambda", 0, std::nullopt, 0});
    defects.families.push_back(spawn_labels(eta, omega, LabelRule::x_style, 0, "X", 0, 2));
    defects.relations.push_back({"Q_a <= X_0", {DefectRef::Kind::single, 0, 0},
                                 {DefectRef::Kind::label, 0, 0}});
    defects.relations.push_back({"Q_a <= Q^lambda", {DefectRef::Kind::single, 0, 0},
                                 {DefectRef::Kind::single, 1, 0}});
    return make({std::move(eta), std::move(minus), std::move(omega)}, std::move(defects));
  }

  CoupledEnsemble operator()(const Segment& s) const {
    const Density rho(s.rho);
    const Density lambda(s.lambda);
    const Site n = segment_length(s.rho, s.lambda, s.u, spec.horizon);
    Configuration eta(w);
    Configuration zeta(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      const double u = u_at(spec, replica, i);
      std::pair<std::int64_t, std::int64_t> pair;
      if (i == -n) {
        pair = couple_monotone(Law::mu_hat(lambda), Law::mu_hat(rho), u);
      } else if (i > -n && i <= 0) {
        const auto k = sample_via_quantile(Law::geometric(lambda), u);
        pair = {k, k};
      } else {
        pair = couple_monotone(Law::geometric(lambda), Law::geometric(rho), u);
      }
      eta.counts[w.index(i)] = static_cast<std::int32_t>(pair.first);
      zeta.counts[w.index(i)] = static_cast<std::int32_t>(pair.second);
    }
    Configuration xi(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      xi.counts[w.index(i)] = i <= -n ? zeta.counts[w.index(i)] : eta.counts[w.index(i)];
    }
    DefectSet defects;
    defects.singles.push_back({"Q^(-n)", 0, std::nullopt, -n});
    defects.families.push_back(spawn_labels(eta, xi, LabelRule::y_style, -n, "Y", 0, 1));
    defects.relations.push_back({"Y_0 <= Q^(-n)", {DefectRef::Kind::label, 0, 0},
                                 {DefectRef::Kind::single, 0, 0}});
    return make({std::move(eta), std::move(xi), std::move(zeta)}, std::move(defects));
  }

  CoupledEnsemble make(std::vector<Configuration> configs, DefectSet defects) const {
    CoupledEnsemble e(std::move(configs), std::move(defects), ClockStream(spec.seed, replica),
                      spec.margin_factor);
    e.set_event_audit(spec.audit_events);
    return e;
  }
};

// Records every checkpoint strictly before `t`.
class CheckpointCursor {
 public:
  CheckpointCursor(const CoupledEnsemble& e, const ScenarioSpec& spec, ObservationLog& log)
      : e_(e), spec_(spec), log_(log) {}

  void flush_before(double t) {
    while (next_ < spec_.checkpoints.size() && spec_.checkpoints[next_] < t) {
      log_.records.push_back(record_state(e_, spec_, spec_.checkpoints[next_]));
      ++next_;
    }
  }
  void flush_all() {
    while (next_ < spec_.checkpoints.size()) {
      log_.records.push_back(record_state(e_, spec_, spec_.checkpoints[next_]));
      ++next_;
    }
  }

 private:
  const CoupledEnsemble& e_;
  const ScenarioSpec& spec_;
  ObservationLog& log_;
  std::size_t next_ = 0;
};

ObservationLog start_log(const CoupledEnsemble& e, const ScenarioSpec& spec) {
  ObservationLog log;
  log.window = e.window();
  for (const auto& d : e.defects().singles) {
    log.defect_names.push_back(d.id);
  }
  log.records.push_back(record_state(e, spec, 0.0));
  return log;
}

void check_truncation(const CoupledEnsemble& e) {
  if (e.truncation_risk()) {
    throw TruncationRisk("a tracked defect reached site " + std::to_string(e.guard_site()) +
                         " near the right edge of the window");
  }
}

SplitMix64 site_clock(std::uint64_t seed, std::uint64_t replica, Site i) {
  return SplitMix64(derive_key(seed, replica, StreamTag::site_clock, static_cast<std::uint64_t>(i)));
}

}  // namespace

CoupledEnsemble init_scenario(const ScenarioSpec& spec, std::uint64_t replica) {
  validate(spec);
  const Window w = build_window(spec);
  return std::visit(Builder{spec, replica, w}, spec.kind);
}

CheckpointRecord record_state(const CoupledEnsemble& e, const ScenarioSpec& spec, double time) {
  CheckpointRecord r;
  r.time = time;
  const auto& defects = e.defects();
  for (const auto& d : defects.singles) {
    r.defects.push_back(d.position);
  }
  for (const auto& f : defects.families) {
    r.anchors.push_back(f.site_of(0));
    r.label_counts.push_back(static_cast<std::int64_t>(f.size()));
  }
  const Window w = e.window();
  r.currents.resize(e.num_configs());
  r.bonds.resize(e.num_configs());
  for (std::size_t c = 0; c < e.num_configs(); ++c) {
    for (double v : spec.observers) {
      const Site bond = int_toward_zero(v * time);
      if (!w.contains(bond)) {
        throw std::domain_error("observer bond " + std::to_string(bond) + " outside the window");
      }
      const auto count = e.bond_counts(c)[w.index(bond)];
      r.bonds[c].push_back(count);
      r.currents[c].push_back(e.heights(c).at(bond) + count);
    }
    if (spec.snapshots) {
      r.occupancy.push_back(e.config(c).counts);
    }
  }
  if (spec.audit_events) {
    r.violations = ordering_audit(e).size();
  }
  return r;
}

ObservationLog run(CoupledEnsemble& e, const ScenarioSpec& spec) {
  auto log = start_log(e, spec);
  CheckpointCursor cursor(e, spec, log);

  if (spec.clock == ClockMode::race) {
    while (auto ring = e.next_ring(spec.horizon)) {
      cursor.flush_before(ring->time);
      e.apply_ring(ring->site);
      check_truncation(e);
    }
  } else {
    using Entry = std::pair<double, Site>;
    const Window w = e.window();
    std::vector<SplitMix64> clocks;
    std::vector<Entry> heap;
    clocks.reserve(w.size());
    heap.reserve(w.size());
    for (Site i = w.lo; i <= w.hi; ++i) {
      clocks.push_back(site_clock(spec.seed, e.clock().replica(), i));
      heap.emplace_back(clocks.back().exponential(), i);
    }
    const auto later = std::greater<Entry>{};
    std::make_heap(heap.begin(), heap.end(), later);
    while (!heap.empty() && heap.front().first <= spec.horizon) {
      std::pop_heap(heap.begin(), heap.end(), later);
      auto& [t, site] = heap.back();
      cursor.flush_before(t);
      e.advance_to(t);
      e.apply_ring(site);
      check_truncation(e);
      t += clocks[w.index(site)].exponential();
      std::push_heap(heap.begin(), heap.end(), later);
    }
    e.advance_to(std::max(e.now(), spec.horizon));
  }
  cursor.flush_all();
  log.events = e.events();
  return log;
}

ObservationLog run_rings(CoupledEnsemble& e, const ScenarioSpec& spec, std::span<const Ring> rings,
                         bool skip_inactive) {
  auto log = start_log(e, spec);
  CheckpointCursor cursor(e, spec, log);
  for (const auto& ring : rings) {
    if (ring.time > spec.horizon) {
      break;
    }
    cursor.flush_before(ring.time);
    e.advance_to(ring.time);
    if (skip_inactive && !e.is_active(ring.site)) {
      continue;
    }
    e.apply_ring(ring.site);
    check_truncation(e);
  }
  e.advance_to(std::max(e.now(), spec.horizon));
  cursor.flush_all();
  log.events = e.events();
  return log;
}

std::vector<Ring> per_site_rings(Window window, double horizon, std::uint64_t seed,
                                 std::uint64_t replica) {
  std::vector<Ring> rings;
  for (Site i = window.lo; i <= window.hi; ++i) {
    auto clock = site_clock(seed, replica, i);
    for (double t = clock.exponential(); t <= horizon; t += clock.exponential()) {
      rings.push_back({t, i});
    }
  }
  std::sort(rings.begin(), rings.end(), [](const Ring& a, const Ring& b) {
    return a.time < b.time || (a.time == b.time && a.site < b.site);
  });
  return rings;
}

}  // namespace zrplab
