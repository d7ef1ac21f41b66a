#include "zrplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "zrplab/defects.hpp"
#include "zrplab/measures.hpp"
#include "zrplab/observables.hpp"
#include "zrplab/rng.hpp"

namespace zrplab {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// Independent seeds for the two sides of a comparison.
std::uint64_t side_seed(std::uint64_t seed, std::uint64_t side) {
  return side == 0 ? seed : mix64(seed ^ (0x9E3779B97F4A7C15ULL * side));
}

Estimate scaled(Estimate e, double factor) {
  e.value *= factor;
  e.std_error *= std::abs(factor);
  return e;
}

Estimate exact(double value) { return Estimate{value, 0.0, 0}; }

ScenarioSpec base_spec(ScenarioKind kind, double horizon, const ExperimentOptions& opts) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.horizon = horizon;
  if (horizon > 0.0) {
    spec.checkpoints = {horizon};
  }
  spec.seed = opts.seed;
  spec.margin_factor = opts.margin_factor;
  spec.clock = opts.clock;
  return spec;
}

// Sorted positive times of a grid, and for every grid entry the record index
// (0 is the initial state).
std::pair<std::vector<double>, std::vector<std::size_t>> grid_checkpoints(
    const std::vector<double>& t_grid) {
  std::vector<double> cps;
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::domain_error("time grid entries must be finite and nonnegative");
    }
    if (t > 0.0) {
      cps.push_back(t);
    }
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  std::vector<std::size_t> index;
  for (double t : t_grid) {
    if (t == 0.0) {
      index.push_back(0);
    } else {
      index.push_back(1 + static_cast<std::size_t>(
                              std::lower_bound(cps.begin(), cps.end(), t) - cps.begin()));
    }
  }
  return {cps, index};
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back(r[k]);
  }
  return out;
}

}  // namespace

EnsembleRun run_ensemble(const ScenarioSpec& spec, std::size_t replicas, std::size_t workers) {
  if (replicas < 1) {
    throw ConfigError("at least one replica is required");
  }
  validate(spec);
  return map_replicas(replicas, workers, [&spec](std::uint64_t r) {
    auto e = init_scenario(spec, r);
    return run(e, spec);
  });
}

IdentityReport make_report(std::string name, const Estimate& lhs, const Estimate& rhs,
                           double threshold) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.z = z_score(lhs, rhs);
  r.pass = std::abs(r.z) < threshold;
  return r;
}

ExponentFit fit_exponent(const MomentSeries& series) {
  const auto& es = series.entries;
  if (es.size() < 4) {
    throw std::domain_error("an exponent fit needs at least 4 entries");
  }
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> rel;
  for (const auto& e : es) {
    if (!(e.t > 0.0) || !(e.estimate > 0.0)) {
      throw std::domain_error("exponent fits need positive times and estimates");
    }
    x.push_back(std::log(e.t));
    y.push_back(std::log(e.estimate));
    rel.push_back(e.std_error / e.estimate);
  }
  auto sorted = x;
  std::sort(sorted.begin(), sorted.end());
  if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 4) {
    throw std::domain_error("an exponent fit needs at least 4 distinct times");
  }
  const double n = static_cast<double>(x.size());
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (x[i] - xbar) / sxx;
    var += w * w * rel[i] * rel[i];
  }
  fit.slope_stderr = std::sqrt(var);
  fit.t_min = std::min_element(es.begin(), es.end(), [](auto& a, auto& b) { return a.t < b.t; })->t;
  fit.t_max = std::max_element(es.begin(), es.end(), [](auto& a, auto& b) { return a.t < b.t; })->t;
  return fit;
}

IdentityRun verify_identities(double rho, const std::vector<double>& speeds, double t,
                              std::size_t replicas, const ExperimentOptions& opts) {
  if (!(t > 0.0)) {
    throw std::domain_error("identities need t > 0");
  }
  const Density density(rho);

  auto stat = base_spec(Stationary{rho}, t, opts);
  stat.observers = speeds;
  auto currents = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(stat, r);
    const auto log = run(e, stat);
    const auto& row = log.records.back().currents[0];
    return std::vector<double>(row.begin(), row.end());
  });

  auto pair = base_spec(MuHatPair{rho}, t, opts);
  pair.seed = side_seed(opts.seed, 1);
  auto positions = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(pair, r);
    return static_cast<double>(run(e, pair).records.back().defects[0]);
  });

  IdentityRun out;
  out.replicas = replicas;
  out.aborted = currents.aborted + positions.aborted;
  const double var0 = rho * (1.0 + rho);
  for (std::size_t k = 0; k < speeds.size(); ++k) {
    const double v = speeds[k];
    const auto bond = static_cast<double>(int_toward_zero(v * t));
    const auto j = column(currents.values, k);
    out.reports.push_back(make_report("variance_identity V=" + fmt(v), variance_estimate(j),
                                      scaled(abs_moment_estimate(positions.values, bond, 1.0), var0)));
    out.reports.push_back(make_report("mean_current V=" + fmt(v), mean_estimate(j),
                                      exact(hydrodynamic_flux(rho) * t - rho * bond)));
  }
  out.reports.push_back(make_report("defect_speed", mean_estimate(positions.values),
                                    exact(characteristic_speed(rho) * t)));
  return out;
}

std::pair<Site, Site> two_point_interior(double rho, double t, std::int64_t site_range,
                                         double margin_factor) {
  ScenarioSpec spec;
  spec.kind = Stationary{rho};
  spec.horizon = t;
  spec.margin_factor = margin_factor;
  const Window w = build_window(spec);
  const auto reach = static_cast<std::int64_t>(std::ceil(t + 12.0 * std::sqrt(t)));
  return {w.lo + reach + 1 + site_range, w.hi - site_range};
}

TwoPointResult two_point_check(double rho, double t, std::int64_t site_range, std::size_t samples,
                               const ExperimentOptions& opts,
                               std::optional<std::pair<Site, Site>> interior) {
  if (!(t > 0.0)) {
    throw std::domain_error("the two-point check needs t > 0");
  }
  const auto reach = static_cast<std::int64_t>(std::ceil(t + 12.0 * std::sqrt(t)));
  if (site_range < reach) {
    throw std::domain_error("site range " + std::to_string(site_range) + " does not cover " +
                            std::to_string(reach));
  }
  const Density density(rho);
  auto stat = base_spec(Stationary{rho}, t, opts);
  stat.snapshots = true;
  const Window w = build_window(stat);
  const auto [j_lo, j_hi] =
      interior ? *interior : two_point_interior(rho, t, site_range, opts.margin_factor);
  if (j_lo > j_hi || j_lo - site_range < w.lo + reach + 1 || j_hi + site_range > w.hi) {
    throw std::domain_error("window too short for translation averaging; raise the margin factor");
  }
  const std::size_t width = static_cast<std::size_t>(2 * site_range + 1);

  // Per replica: S(i) for i = -R..R, then the two sums.
  auto rows = map_replicas(samples, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(stat, r);
    const auto log = run(e, stat);
    const auto& before = log.records.front().occupancy[0];
    const auto& after = log.records.back().occupancy[0];
    std::vector<double> s(width + 2, 0.0);
    for (Site j = j_lo; j <= j_hi; ++j) {
      const double a = before[w.index(j)] - rho;
      for (std::int64_t i = -site_range; i <= site_range; ++i) {
        s[static_cast<std::size_t>(i + site_range)] += (after[w.index(j + i)] - rho) * a;
      }
    }
    const double terms = static_cast<double>(j_hi - j_lo + 1);
    for (std::int64_t i = -site_range; i <= site_range; ++i) {
      auto& v = s[static_cast<std::size_t>(i + site_range)];
      v /= terms;
      s[width] += v;
      s[width + 1] += static_cast<double>(i) * v;
    }
    return s;
  });

  auto pair = base_spec(MuHatPair{rho}, t, opts);
  pair.seed = side_seed(opts.seed, 1);
  auto positions = map_replicas(samples, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(pair, r);
    return static_cast<double>(run(e, pair).records.back().defects[0]);
  });

  TwoPointResult out;
  out.samples = samples;
  out.aborted = rows.aborted + positions.aborted;
  const double var0 = rho * (1.0 + rho);
  for (std::int64_t i = -site_range; i <= site_range; ++i) {
    out.sites.push_back(i);
    const auto lhs = mean_estimate(column(rows.values, static_cast<std::size_t>(i + site_range)));
    const auto rhs = scaled(proportion_estimate(positions.values, static_cast<double>(i)), var0);
    out.per_site.push_back(make_report("two_point i=" + std::to_string(i), lhs, rhs));
  }
  out.sum_rule = make_report("two_point_sum", mean_estimate(column(rows.values, width)), exact(var0));
  out.first_moment = make_report("two_point_first_moment",
                                 mean_estimate(column(rows.values, width + 1)),
                                 exact(var0 * characteristic_speed(rho) * t));
  return out;
}

DefectSamples defect_samples(double rho, const std::vector<double>& t_grid, std::size_t replicas,
                             const ExperimentOptions& opts) {
  const auto [cps, index] = grid_checkpoints(t_grid);
  auto spec = base_spec(MuHatPair{rho}, cps.empty() ? 0.0 : cps.back(), opts);
  spec.checkpoints = cps;
  auto rows = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(spec, r);
    const auto log = run(e, spec);
    std::vector<double> q;
    q.reserve(index.size());
    for (auto k : index) {
      q.push_back(static_cast<double>(log.records[k].defects[0]));
    }
    return q;
  });
  DefectSamples out;
  out.rho = rho;
  out.t_grid = t_grid;
  out.replicas = replicas;
  out.aborted = rows.aborted;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    out.positions.push_back(column(rows.values, k));
  }
  return out;
}

MomentSeries moment_series(const DefectSamples& samples, double m) {
  if (!(m >= 1.0 && m < 3.0)) {
    throw std::domain_error("moment order must lie in [1, 3)");
  }
  MomentSeries series;
  series.m = m;
  for (std::size_t k = 0; k < samples.t_grid.size(); ++k) {
    const double t = samples.t_grid[k];
    const auto center = static_cast<double>(int_toward_zero(characteristic_speed(samples.rho) * t));
    const auto est = abs_moment_estimate(samples.positions[k], center, m);
    series.entries.push_back({t, est.value, est.std_error, est.n});
  }
  return series;
}

MomentSeries moment_series(double rho, double m, const std::vector<double>& t_grid,
                           std::size_t replicas, const ExperimentOptions& opts) {
  if (!(m >= 1.0 && m < 3.0)) {
    throw std::domain_error("moment order must lie in [1, 3)");
  }
  return moment_series(defect_samples(rho, t_grid, replicas, opts), m);
}

DiffusivitySeries diffusivity_series(const DefectSamples& samples) {
  DiffusivitySeries out;
  out.variance.m = 2.0;
  out.diffusivity.m = 2.0;
  for (std::size_t k = 0; k < samples.t_grid.size(); ++k) {
    const double t = samples.t_grid[k];
    const auto var = variance_estimate(samples.positions[k]);
    out.variance.entries.push_back({t, var.value, var.std_error, var.n});
    if (t > 0.0) {
      out.diffusivity.entries.push_back({t, var.value / t, var.std_error / t, var.n});
    }
  }
  return out;
}

std::vector<OffcharResult> offchar_suite(double rho, const std::vector<double>& speeds, double t,
                                         std::size_t replicas, const ExperimentOptions& opts,
                                         double min_gap) {
  if (!(t > 0.0)) {
    throw std::domain_error("the off-characteristic suite needs t > 0");
  }
  const Density density(rho);
  const double vc = characteristic_speed(rho);
  for (double v : speeds) {
    if (!(std::abs(v - vc) >= min_gap)) {
      throw std::domain_error("speed " + fmt(v) + " is too close to the characteristic speed " +
                              fmt(vc));
    }
  }
  auto stat = base_spec(Stationary{rho}, t, opts);
  stat.observers = speeds;
  auto rows = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(stat, r);
    const auto log = run(e, stat);
    const auto& row = log.records.back().currents[0];
    return std::vector<double>(row.begin(), row.end());
  });

  std::vector<OffcharResult> out;
  const double var0 = rho * (1.0 + rho);
  for (std::size_t k = 0; k < speeds.size(); ++k) {
    const auto j = column(rows.values, k);
    OffcharResult res;
    res.speed = speeds[k];
    res.replicas = replicas;
    res.aborted = rows.aborted;
    const double target = var0 * std::abs(vc - speeds[k]);
    res.variance = make_report("offchar_variance V=" + fmt(speeds[k]),
                               scaled(variance_estimate(j), 1.0 / t), exact(target));
    res.relative_error = std::abs(res.variance.lhs.value / target - 1.0);
    const auto mean = mean_estimate(j).value;
    const double sd = std::sqrt(variance_estimate(j).value);
    std::vector<std::int64_t> ints;
    std::vector<double> standardized;
    for (double x : j) {
      ints.push_back(static_cast<std::int64_t>(x));
      standardized.push_back((x - mean) / sd);
    }
    res.ks = ks_distance_normal_lattice(std::move(ints), mean, sd);
    res.ks_raw = ks_distance_normal(std::move(standardized));
    out.push_back(std::move(res));
  }
  return out;
}

Lemma41Result lemma41_pathwise(double rho, double lambda, std::int64_t u, double speed, double t,
                               std::size_t replicas, const ExperimentOptions& opts,
                               bool desynchronize) {
  auto spec = base_spec(Segment{rho, lambda, u}, t, opts);
  spec.observers = {speed};
  spec.audit_events = !desynchronize;
  const auto bound = int_toward_zero(speed * t);

  struct Outcome {
    bool applicable = false;
    bool violation = false;
    std::size_t audit = 0;
  };
  auto rows = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(spec, r);
    Outcome o;
    std::int64_t q = 0;
    std::int64_t j_eta = 0;
    std::int64_t j_zeta = 0;
    if (desynchronize) {
      auto other = e;
      other.reseed_clock(1);
      auto other_spec = spec;
      other_spec.seed = side_seed(spec.seed, 1);
      const auto log = run(e, spec);
      const auto other_log = run(other, other_spec);
      q = log.records.back().defects[0];
      j_eta = log.records.back().currents[0][0];
      j_zeta = other_log.records.back().currents[2][0];
    } else {
      const auto log = run(e, spec);
      const auto& last = log.records.back();
      q = last.defects[0];
      j_eta = last.currents[0][0];
      j_zeta = last.currents[2][0];
      for (const auto& rec : log.records) {
        o.audit += rec.violations;
      }
    }
    o.applicable = q <= bound;
    o.violation = o.applicable && j_zeta - j_eta > 0;
    return o;
  });

  Lemma41Result out;
  out.replicas = replicas;
  out.aborted = rows.aborted;
  for (const auto& o : rows.values) {
    out.applicable += o.applicable ? 1 : 0;
    out.violations += o.violation ? 1 : 0;
    out.audit_violations += o.audit;
  }
  return out;
}

TaggedParticleResult tagged_particle_suite(double alpha, const std::vector<double>& t_grid,
                                           std::size_t replicas, const ExperimentOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha must lie in (0, 1)");
  }
  const double rho = tasep_rho_from_alpha(alpha);
  const double speed = alpha * alpha;
  const auto [cps, index] = grid_checkpoints(t_grid);
  auto spec = base_spec(Stationary{rho}, cps.empty() ? 0.0 : cps.back(), opts);
  spec.checkpoints = cps;
  spec.observers = {speed};
  auto rows = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
    auto e = init_scenario(spec, r);
    const auto log = run(e, spec);
    std::vector<double> j;
    for (auto k : index) {
      j.push_back(static_cast<double>(log.records[k].currents[0][0]));
    }
    return j;
  });

  TaggedParticleResult out;
  out.alpha = alpha;
  out.replicas = replicas;
  out.aborted = rows.aborted;
  out.variance.m = 2.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const auto j = column(rows.values, k);
    const auto shift = static_cast<double>(int_toward_zero(speed * t));
    std::vector<double> pos;
    pos.reserve(j.size());
    for (double x : j) {
      pos.push_back(tasep_view(static_cast<std::int64_t>(x), static_cast<std::int64_t>(shift)));
    }
    const auto var = variance_estimate(pos);
    out.variance.entries.push_back({t, var.value, var.std_error, var.n});
    auto mean = mean_estimate(pos);
    mean.value -= (2.0 * alpha - 1.0) * t;
    out.mean_offset.push_back(mean);
    out.current_variance.push_back(variance_estimate(j));
  }
  return out;
}

TasepCheck tasep_bijection_check(double rho, std::size_t particles, double horizon,
                                 const std::vector<double>& checkpoints, std::size_t replicas,
                                 std::uint64_t seed) {
  if (particles < 2) {
    throw std::domain_error("the bijection check needs at least 2 particles");
  }
  const auto n = static_cast<Site>(particles);
  const Window w{-(n / 2 - 1), -(n / 2 - 1) + n - 1};
  const auto law = Law::geometric(Density(rho));
  auto cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.push_back(horizon);

  auto rows = map_replicas(replicas, 1, [&](std::uint64_t r) {
    Configuration initial(w);
    for (Site i = w.lo; i <= w.hi; ++i) {
      initial.counts[w.index(i)] =
          static_cast<std::int32_t>(sample_via_quantile(law, site_uniform(seed, r, i)));
    }
    TasepState tasep = tasep_from_zrp(initial);
    CoupledEnsemble zrp({initial}, {}, ClockStream(seed, r));
    const auto rings = per_site_rings(w, horizon, seed, r);

    TasepCheck c;
    auto compare = [&] {
      const auto mapped = tasep_view(zrp, 0);
      for (std::size_t k = 0; k < mapped.size(); ++k) {
        ++c.comparisons;
        c.mismatches += mapped[k] == tasep.positions[k] ? 0 : 1;
      }
    };
    std::size_t next = 0;
    for (const auto& ring : rings) {
      while (next < cps.size() && cps[next] < ring.time) {
        compare();
        ++next;
      }
      zrp.advance_to(ring.time);
      zrp.apply_ring(ring.site);
      tasep_step_direct(tasep, ring.site);
    }
    for (; next < cps.size(); ++next) {
      compare();
    }
    return c;
  });

  TasepCheck out;
  for (const auto& c : rows.values) {
    out.comparisons += c.comparisons;
    out.mismatches += c.mismatches;
  }
  return out;
}

std::size_t AuditResult::total_violations() const {
  std::size_t n = 0;
  for (const auto& [kind, count] : violations) {
    n += count;
  }
  return n;
}

AuditResult coupling_audit(double t, std::size_t replicas, const ExperimentOptions& opts) {
  const std::vector<ScenarioKind> kinds = {Stationary{1.0}, MuHatPair{1.0},
                                           ThreeProcess{1.0, 0.5}, Segment{1.0, 0.8, 5}};
  AuditResult out;
  for (const auto& kind : kinds) {
    auto spec = base_spec(kind, t, opts);
    spec.audit_events = true;
    spec.checkpoints.clear();
    for (int k = 1; k <= 5; ++k) {
      spec.checkpoints.push_back(t * k / 5.0);
    }
    const auto name = scenario_name(kind);
    auto rows = map_replicas(replicas, opts.workers, [&](std::uint64_t r) {
      std::map<std::string, std::size_t> found;
      auto e = init_scenario(spec, r);
      for (const auto& v : ordering_audit(e)) {
        ++found[name + "/" + v.kind];
      }
      try {
        const auto log = run(e, spec);
        for (const auto& v : ordering_audit(e)) {
          ++found[name + "/" + v.kind];
        }
        for (const auto& rec : log.records) {
          if (rec.violations > 0) {
            found[name + "/checkpoint"] += rec.violations;
          }
          if (rec.label_counts != log.records.front().label_counts) {
            ++found[name + "/label count"];
          }
        }
      } catch (const InvariantViolation&) {
        ++found[name + "/event"];
      }
      return found;
    });
    out.replicas[name] = replicas - rows.aborted;
    out.aborted += rows.aborted;
    for (const auto& found : rows.values) {
      for (const auto& [k, n] : found) {
        out.violations[k] += n;
      }
    }
  }
  return out;
}

std::vector<TruncationCheck> truncation_audit(const TruncationAuditConfig& config) {
  std::vector<TruncationCheck> out;
  for (double factor : {1.0, 2.0}) {
    ExperimentOptions opts;
    opts.seed = config.seed;
    opts.workers = config.workers;
    opts.margin_factor = factor;
    opts.clock = ClockMode::per_site;

    std::vector<std::pair<std::string, Estimate>> found;
    const auto short_run = verify_identities(1.0, {0.0}, 100.0, config.replicas, opts);
    found.emplace_back("mean_current t=100", short_run.reports[1].lhs);
    const auto long_run = verify_identities(1.0, {0.0, 0.25}, 200.0, config.replicas, opts);
    for (const auto& r : long_run.reports) {
      if (r.name.rfind("variance_identity", 0) == 0) {
        found.emplace_back(r.name + " lhs t=200", r.lhs);
        found.emplace_back(r.name + " rhs t=200", r.rhs);
      }
    }
    found.emplace_back("defect_speed t=200", long_run.reports.back().lhs);

    auto tp_opts = opts;
    tp_opts.margin_factor = config.two_point_margin * factor;
    const auto interior = two_point_interior(1.0, 20.0, 74, config.two_point_margin);
    const auto tp = two_point_check(1.0, 20.0, 74, config.two_point_samples, tp_opts, interior);
    found.emplace_back("two_point_sum t=20", tp.sum_rule.lhs);
    found.emplace_back("two_point_first_moment t=20", tp.first_moment.lhs);

    for (std::size_t k = 0; k < found.size(); ++k) {
      if (factor == 1.0) {
        out.push_back({found[k].first, found[k].second, {}, false});
      } else {
        auto& c = out[k];
        c.doubled = found[k].second;
        c.pass = std::abs(c.doubled.value - c.base.value) < c.base.std_error;
      }
    }
  }
  return out;
}

}  // namespace zrplab
