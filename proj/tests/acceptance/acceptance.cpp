// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Full replica counts; expect the better part of an hour on one core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "zrplab/cli.hpp"
#include "zrplab/experiments.hpp"
#include "zrplab/observables.hpp"

using namespace zrplab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string show(const IdentityReport& r) {
  return r.name + " lhs=" + fmt("%.6g", r.lhs.value) + "+-" + fmt("%.3g", r.lhs.std_error) +
         " rhs=" + fmt("%.6g", r.rhs.value) + "+-" + fmt("%.3g", r.rhs.std_error) +
         " z=" + fmt("%.3f", r.z);
}

std::string show(const ExponentFit& f) {
  return "slope=" + fmt("%.4f", f.slope) + "+-" + fmt("%.4f", f.slope_stderr);
}

std::size_t workers() {
  if (const char* w = std::getenv("ZRPLAB_WORKERS"); w && *w) {
    return static_cast<std::size_t>(std::max(1L, std::atol(w)));
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

ExperimentOptions opts() {
  ExperimentOptions o;
  o.workers = workers();
  return o;
}

bool within(const IdentityReport& r) { return std::abs(r.z) < kDefaultZThreshold; }

Outcome mean_current() {
  ScenarioSpec spec;
  spec.kind = Stationary{1.0};
  spec.horizon = 100;
  spec.checkpoints = {100};
  spec.observers = {0.0};
  const auto ens = run_ensemble(spec, 10000, workers());
  std::vector<double> j;
  for (const auto& log : ens.values) {
    j.push_back(static_cast<double>(log.records.back().currents[0][0]));
  }
  const auto r = make_report("mean J", mean_estimate(j), {50.0, 0.0, 1});
  return {within(r) && ens.valid(), show(r) + " aborted=" + std::to_string(ens.aborted)};
}

Outcome defect_speed() {
  const auto s = defect_samples(1.0, {200.0}, 10000, opts());
  const auto r = make_report("mean Q_a", mean_estimate(s.positions[0]), {50.0, 0.0, 1});
  return {within(r) && s.aborted == 0, show(r) + " aborted=" + std::to_string(s.aborted)};
}

Outcome variance_identity() {
  const auto run = verify_identities(1.0, {0.0, 0.25}, 200.0, 20000, opts());
  Outcome o{run.aborted == 0, "aborted=" + std::to_string(run.aborted)};
  for (std::size_t k : {0u, 2u}) {
    const auto& r = run.reports[k];
    o.pass = o.pass && within(r);
    o.detail += "; V=" + fmt("%g", k == 0 ? 0.0 : 0.25) + " " + show(r);
  }
  return o;
}

Outcome two_point() {
  auto o = opts();
  o.margin_factor = 4.0;
  const auto tp = two_point_check(1.0, 20.0, 74, 10000, o);
  Outcome out{within(tp.sum_rule) && within(tp.first_moment) && tp.aborted == 0,
              show(tp.sum_rule) + "; " + show(tp.first_moment)};
  int checked = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < tp.sites.size(); ++k) {
    if (std::abs(tp.sites[k] - 5) <= 10) {
      ++checked;
      worst = std::max(worst, std::abs(tp.per_site[k].z));
      out.pass = out.pass && within(tp.per_site[k]);
    }
  }
  out.detail += "; per-site sites=" + std::to_string(checked) + " max|z|=" + fmt("%.3f", worst);
  return out;
}

const std::vector<double> kGrid = {125.0, 250.0, 500.0, 1000.0, 2000.0};

DefectSamples& scaling_samples() {
  static DefectSamples s = defect_samples(1.0, kGrid, 4000, opts());
  return s;
}

Outcome superdiffusive() {
  const auto& s = scaling_samples();
  const auto fit = fit_exponent(moment_series(s, 1.0));
  const bool band = fit.slope >= 0.55 && fit.slope <= 0.80;
  const bool sup = fit.slope - 0.5 > 2.0 * fit.slope_stderr;
  return {band && sup && s.aborted == 0,
          "m=1 " + show(fit) + " band [0.55, 0.80]; slope - 0.5 > 2 se: " + (sup ? "yes" : "no")};
}

Outcome second_moment() {
  const auto& s = scaling_samples();
  const auto m2 = fit_exponent(moment_series(s, 2.0));
  const auto d = fit_exponent(diffusivity_series(s).diffusivity);
  const bool ok = m2.slope >= 1.15 && m2.slope <= 1.55 && d.slope >= 0.20 && d.slope <= 0.47;
  return {ok && s.aborted == 0,
          "m=2 " + show(m2) + " band [1.15, 1.55]; D(t) " + show(d) + " band [0.20, 0.47]"};
}

Outcome off_characteristic() {
  const auto suite = offchar_suite(1.0, {0.0, 1.0}, 500.0, 10000, opts());
  Outcome o{true, ""};
  for (const auto& r : suite) {
    o.pass = o.pass && r.relative_error < 0.1 && r.ks < 0.03 && r.aborted == 0;
    o.detail += "V=" + fmt("%g", r.speed) + " Var/t=" + fmt("%.4f", r.variance.lhs.value) +
                " target " + fmt("%g", r.variance.rhs.value) + " rel=" +
                fmt("%.4f", r.relative_error) + " KS=" + fmt("%.4f", r.ks) + " (raw " +
                fmt("%.4f", r.ks_raw) + "); ";
  }
  return o;
}

Outcome lemma41() {
  const double V = characteristic_speed(1.0);
  const auto r = lemma41_pathwise(1.0, 0.8, 5, V, 50.0, 10000, opts());
  const auto control = lemma41_pathwise(1.0, 0.8, 5, V, 50.0, 1000, opts(), true);
  return {r.violations == 0 && r.audit_violations == 0 && r.aborted == 0 &&
              control.violations >= 1,
          "violations=" + std::to_string(r.violations) + " of " + std::to_string(r.applicable) +
              " applicable, audit=" + std::to_string(r.audit_violations) +
              "; desynchronized control violations=" + std::to_string(control.violations)};
}

Outcome coupling() {
  const auto a = coupling_audit(50.0, 1000, opts());
  std::string detail = "violations=" + std::to_string(a.total_violations()) + " scenarios=";
  for (const auto& [name, n] : a.replicas) {
    detail += name + ":" + std::to_string(n) + " ";
  }
  for (const auto& [kind, n] : a.violations) {
    detail += kind + "=" + std::to_string(n) + " ";
  }
  return {a.total_violations() == 0 && a.aborted == 0, detail};
}

Outcome tasep() {
  std::vector<double> cps;
  for (double t = 1.0; t <= 20.0; t += 1.0) {
    cps.push_back(t);
  }
  const auto b = tasep_bijection_check(1.0, 50, 20.0, cps, 100, 1);
  const auto tagged = tagged_particle_suite(0.5, kGrid, 4000, opts());
  const auto fit = fit_exponent(tagged.variance);
  return {b.mismatches == 0 && b.comparisons > 0 && fit.slope >= 0.55 && fit.slope <= 0.80 &&
              tagged.aborted == 0,
          "mismatches=" + std::to_string(b.mismatches) + " of " + std::to_string(b.comparisons) +
              "; tagged variance " + show(fit) + " band [0.55, 0.80]"};
}

Outcome truncation() {
  TruncationAuditConfig cfg;
  cfg.workers = workers();
  Outcome o{true, ""};
  for (const auto& c : truncation_audit(cfg)) {
    o.pass = o.pass && c.pass;
    o.detail += c.name + " " + fmt("%.5g", c.base.value) + "->" + fmt("%.5g", c.doubled.value) +
                " (se " + fmt("%.3g", c.base.std_error) + ")" + (c.pass ? "" : " FAIL") + "; ";
  }
  return o;
}

Outcome determinism() {
  auto c = cli::default_config();
  c.experiment = "verify";
  c.rho = 1.0;
  c.speeds = {0.0};
  c.t = 100;
  c.replicas = 2000;
  c.workers = workers();
  const auto a = cli::results_csv(cli::execute(c));
  const auto b = cli::results_csv(cli::execute(c));
  c.workers = workers() + 2;
  const auto d = cli::results_csv(cli::execute(c));
  return {a == b && a == d && a.size() > 100,
          "results.csv " + std::to_string(a.size()) + " bytes; repeat " +
              (a == b ? "identical" : "differs") + "; other worker count " +
              (a == d ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mean current", mean_current},
      {"defect speed", defect_speed},
      {"variance identity", variance_identity},
      {"two-point sum rules", two_point},
      {"superdiffusive first moment", superdiffusive},
      {"second moment and diffusivity", second_moment},
      {"off-characteristic fluctuations", off_characteristic},
      {"pathwise current comparison", lemma41},
      {"coupling invariants", coupling},
      {"TASEP bijection and tagged particle", tasep},
      {"truncation audit", truncation},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
