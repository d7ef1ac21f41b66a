#include "zrplab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zrplab/errors.hpp"
#include "zrplab/observables.hpp"

namespace zrplab::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string num(double x) {
  if (std::isnan(x)) {
    return {};
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid integer for " + key + ": '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) {
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_real(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    return false;
  }
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out += (k ? "," : "") + num(xs[k]);
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field real_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_real(k, v);
          },
          [member](const RunConfig& c) { return num(c.*member); }};
}

template <class T>
Field int_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_int<T>(k, v);
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field list_field(std::vector<double> RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_list(k, v);
          },
          [member](const RunConfig& c) { return list_text(c.*member); }};
}

Field text_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = trim(v); },
          [member](const RunConfig& c) { return c.*member; }};
}

Field bool_field(bool RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_bool(k, v);
          },
          [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"experiment", text_field(&RunConfig::experiment)},
      {"scenario", text_field(&RunConfig::scenario)},
      {"rho", real_field(&RunConfig::rho)},
      {"lambda", real_field(&RunConfig::lambda)},
      {"u", int_field(&RunConfig::u)},
      {"horizon", real_field(&RunConfig::horizon)},
      {"checkpoints", list_field(&RunConfig::checkpoints)},
      {"V", list_field(&RunConfig::speeds)},
      {"seed", int_field(&RunConfig::seed)},
      {"margin_factor", real_field(&RunConfig::margin_factor)},
      {"clock", text_field(&RunConfig::clock)},
      {"t", real_field(&RunConfig::t)},
      {"t_grid", list_field(&RunConfig::t_grid)},
      {"m", real_field(&RunConfig::m)},
      {"replicas", int_field(&RunConfig::replicas)},
      {"workers", int_field(&RunConfig::workers)},
      {"site_range", int_field(&RunConfig::site_range)},
      {"twopoint_margin", real_field(&RunConfig::twopoint_margin)},
      {"alpha", real_field(&RunConfig::alpha)},
      {"particles", int_field(&RunConfig::particles)},
      {"tagged_replicas", int_field(&RunConfig::tagged_replicas)},
      {"desync", bool_field(&RunConfig::desync)},
      {"truncation", bool_field(&RunConfig::truncation)},
      {"out_dir", text_field(&RunConfig::out_dir)},
  };
  return table;
}

ExperimentOptions options(const RunConfig& c) {
  ExperimentOptions o;
  o.seed = c.seed;
  o.workers = c.workers;
  o.margin_factor = c.margin_factor;
  o.clock = c.clock == "per_site" ? ClockMode::per_site : ClockMode::race;
  return o;
}

ResultRow row(const RunConfig& c, std::string name, double V, double t, double m,
              std::size_t replicas, const Estimate& e) {
  ResultRow r;
  r.experiment = std::move(name);
  r.rho = c.rho;
  r.lambda = kNaN;
  r.u = kNaN;
  r.V = V;
  r.t = t;
  r.m = m;
  r.replicas = replicas;
  r.estimate = e.value;
  r.stderr_ = e.std_error;
  r.seed = c.seed;
  return r;
}

Criterion band(std::string name, double value, double lo, double hi) {
  Criterion c;
  c.name = std::move(name);
  c.lhs = value;
  c.lhs_stderr = kNaN;
  c.rhs = (lo + hi) / 2.0;
  c.rhs_stderr = kNaN;
  c.z = kNaN;
  c.pass = value >= lo && value <= hi;
  c.detail = "band [" + num(lo) + ", " + num(hi) + "]";
  return c;
}

Criterion count_check(std::string name, double value, double target, bool pass,
                      std::string detail) {
  Criterion c;
  c.name = std::move(name);
  c.lhs = value;
  c.lhs_stderr = kNaN;
  c.rhs = target;
  c.rhs_stderr = kNaN;
  c.z = kNaN;
  c.pass = pass;
  c.detail = std::move(detail);
  return c;
}

PlotSeries plot(std::string name, const MomentSeries& s) {
  PlotSeries p;
  p.name = std::move(name);
  for (const auto& e : s.entries) {
    if (e.t > 0.0 && e.estimate > 0.0) {
      p.points.emplace_back(std::log(e.t), std::log(e.estimate));
    }
  }
  return p;
}

void add_series_rows(Results& res, const RunConfig& c, const std::string& name,
                     const MomentSeries& s, double V) {
  for (const auto& e : s.entries) {
    res.rows.push_back(row(c, name, V, e.t, s.m, e.replicas, {e.estimate, e.std_error, e.replicas}));
  }
}

ScenarioKind scenario_kind(const RunConfig& c) {
  if (c.scenario == "stationary") {
    return Stationary{c.rho};
  }
  if (c.scenario == "muhat") {
    return MuHatPair{c.rho};
  }
  if (c.scenario == "three") {
    return ThreeProcess{c.rho, c.lambda};
  }
  if (c.scenario == "segment") {
    return Segment{c.rho, c.lambda, c.u};
  }
  throw ConfigError("unknown scenario '" + c.scenario + "'");
}

// ---------------------------------------------------------------------------

Results simulate(const RunConfig& c) {
  ScenarioSpec spec;
  spec.kind = scenario_kind(c);
  spec.horizon = c.horizon;
  spec.checkpoints = c.checkpoints;
  if (spec.checkpoints.empty() && c.horizon > 0.0) {
    spec.checkpoints = {c.horizon};
  }
  spec.observers = c.speeds;
  spec.seed = c.seed;
  spec.margin_factor = c.margin_factor;
  spec.clock = options(c).clock;
  const auto ens = run_ensemble(spec, c.replicas, c.workers);

  Results res;
  res.aborted = ens.aborted;
  if (ens.values.empty()) {
    return res;
  }
  const auto& first = ens.values.front();
  for (std::size_t k = 0; k < first.records.size(); ++k) {
    const double t = first.records[k].time;
    for (std::size_t d = 0; d < first.defect_names.size(); ++d) {
      std::vector<double> x;
      for (const auto& log : ens.values) {
        x.push_back(static_cast<double>(log.records[k].defects[d]));
      }
      res.rows.push_back(row(c, "simulate/" + first.defect_names[d], kNaN, t, kNaN,
                             x.size(), mean_estimate(x)));
    }
    for (std::size_t cfg = 0; cfg < first.records[k].currents.size(); ++cfg) {
      for (std::size_t v = 0; v < spec.observers.size(); ++v) {
        std::vector<double> x;
        for (const auto& log : ens.values) {
          x.push_back(static_cast<double>(log.records[k].currents[cfg][v]));
        }
        res.rows.push_back(row(c, "simulate/current[" + std::to_string(cfg) + "]",
                               spec.observers[v], t, kNaN, x.size(), mean_estimate(x)));
      }
    }
  }
  for (auto& r : res.rows) {
    if (c.scenario == "three" || c.scenario == "segment") {
      r.lambda = c.lambda;
    }
    if (c.scenario == "segment") {
      r.u = static_cast<double>(c.u);
    }
  }
  return res;
}

Results verify(const RunConfig& c) {
  const auto speeds = c.speeds.empty() ? std::vector<double>{0.0} : c.speeds;
  const auto run = verify_identities(c.rho, speeds, c.t, c.replicas, options(c));
  Results res;
  res.aborted = run.aborted;
  for (std::size_t k = 0; k < run.reports.size(); ++k) {
    const auto& r = run.reports[k];
    res.criteria.push_back(from_report(r));
    const double V = k / 2 < speeds.size() ? speeds[k / 2] : kNaN;
    const auto base = r.name.substr(0, r.name.find(' '));
    res.rows.push_back(row(c, "verify/" + base + "/lhs", V, c.t, kNaN, c.replicas, r.lhs));
    res.rows.push_back(row(c, "verify/" + base + "/rhs", V, c.t, kNaN, c.replicas, r.rhs));
  }
  return res;
}

Results twopoint(const RunConfig& c) {
  auto opts = options(c);
  opts.margin_factor = c.twopoint_margin;
  const auto tp = two_point_check(c.rho, c.t, c.site_range, c.replicas, opts);
  Results res;
  res.aborted = tp.aborted;
  res.criteria.push_back(from_report(tp.sum_rule));
  res.criteria.push_back(from_report(tp.first_moment));
  const auto center = static_cast<std::int64_t>(std::llround(characteristic_speed(c.rho) * c.t));
  for (std::size_t k = 0; k < tp.sites.size(); ++k) {
    const auto i = tp.sites[k];
    const auto& r = tp.per_site[k];
    res.rows.push_back(row(c, "twopoint/S(i=" + std::to_string(i) + ")", kNaN, c.t, kNaN,
                           tp.samples, r.lhs));
    res.rows.push_back(row(c, "twopoint/rho(1+rho)P(Q=" + std::to_string(i) + ")", kNaN, c.t,
                           kNaN, tp.samples, r.rhs));
    if (std::abs(i - center) <= 10) {
      res.criteria.push_back(from_report(r));
    }
  }
  res.rows.push_back(row(c, "twopoint/sum", kNaN, c.t, kNaN, tp.samples, tp.sum_rule.lhs));
  res.rows.push_back(
      row(c, "twopoint/first_moment", kNaN, c.t, kNaN, tp.samples, tp.first_moment.lhs));
  return res;
}

void slope_criteria(Results& res, const std::string& name, const ExponentFit& fit, double m) {
  if (m == 1.0) {
    res.criteria.push_back(band(name + " slope", fit.slope, 0.55, 0.80));
    auto c = count_check(name + " superdiffusive", fit.slope - 0.5, 2.0 * fit.slope_stderr,
                         fit.slope - 0.5 > 2.0 * fit.slope_stderr, "slope - 0.5 > 2 slope_stderr");
    res.criteria.push_back(c);
  } else if (m == 2.0) {
    res.criteria.push_back(band(name + " slope", fit.slope, 1.15, 1.55));
  }
}

Results scaling(const RunConfig& c) {
  const auto samples = defect_samples(c.rho, c.t_grid, c.replicas, options(c));
  const auto series = moment_series(samples, c.m);
  Results res;
  res.aborted = samples.aborted;
  add_series_rows(res, c, "scaling/moment", series, kNaN);
  const auto fit = fit_exponent(series);
  const auto name = "moment m=" + num(c.m);
  res.fits.push_back({name, fit});
  res.plots.push_back(plot("moment_m" + num(c.m), series));
  slope_criteria(res, name, fit, c.m);
  return res;
}

Results diffusivity(const RunConfig& c) {
  const auto samples = defect_samples(c.rho, c.t_grid, c.replicas, options(c));
  const auto series = diffusivity_series(samples);
  Results res;
  res.aborted = samples.aborted;
  add_series_rows(res, c, "diffusivity/variance", series.variance, kNaN);
  add_series_rows(res, c, "diffusivity/D", series.diffusivity, kNaN);
  const auto var_fit = fit_exponent(series.variance);
  const auto d_fit = fit_exponent(series.diffusivity);
  res.fits.push_back({"variance", var_fit});
  res.fits.push_back({"diffusivity", d_fit});
  res.plots.push_back(plot("variance", series.variance));
  res.plots.push_back(plot("diffusivity", series.diffusivity));
  res.criteria.push_back(band("diffusivity slope", d_fit.slope, 0.20, 0.47));
  return res;
}

Results offchar(const RunConfig& c) {
  const auto speeds = c.speeds.empty() ? std::vector<double>{0.0, 1.0} : c.speeds;
  const auto suite = offchar_suite(c.rho, speeds, c.t, c.replicas, options(c));
  Results res;
  for (const auto& r : suite) {
    res.aborted = std::max(res.aborted, r.aborted);
    auto var = from_report(r.variance);
    var.pass = r.relative_error < 0.1;
    var.detail = "relative error " + num(r.relative_error) + " < 0.1";
    res.criteria.push_back(var);
    res.criteria.push_back(count_check("ks V=" + num(r.speed), r.ks, 0.03, r.ks < 0.03,
                                       "lattice corrected; raw " + num(r.ks_raw)));
    res.rows.push_back(row(c, "offchar/var_over_t", r.speed, c.t, kNaN, r.replicas, r.variance.lhs));
    res.rows.push_back(row(c, "offchar/ks", r.speed, c.t, kNaN, r.replicas, {r.ks, kNaN, r.replicas}));
    res.rows.push_back(
        row(c, "offchar/ks_raw", r.speed, c.t, kNaN, r.replicas, {r.ks_raw, kNaN, r.replicas}));
  }
  return res;
}

Results lemma41(const RunConfig& c) {
  const double V = c.speeds.empty() ? characteristic_speed(c.rho) : c.speeds.front();
  const auto r = lemma41_pathwise(c.rho, c.lambda, c.u, V, c.t, c.replicas, options(c), c.desync);
  Results res;
  res.aborted = r.aborted;
  if (c.desync) {
    res.criteria.push_back(count_check("lemma41 negative control", static_cast<double>(r.violations),
                                       1.0, r.violations >= 1, "desynchronized clocks must violate"));
  } else {
    res.criteria.push_back(count_check("lemma41 violations", static_cast<double>(r.violations), 0.0,
                                       r.violations == 0, "pathwise"));
    res.criteria.push_back(count_check("lemma41 audit", static_cast<double>(r.audit_violations),
                                       0.0, r.audit_violations == 0, "coupling audit"));
  }
  for (auto [name, value] : {std::pair{"violations", r.violations},
                             std::pair{"applicable", r.applicable}}) {
    auto rr = row(c, std::string("lemma41/") + name, V, c.t, kNaN, r.replicas,
                  {static_cast<double>(value), kNaN, r.replicas});
    rr.lambda = c.lambda;
    rr.u = static_cast<double>(c.u);
    res.rows.push_back(rr);
  }
  return res;
}

Results tasep(const RunConfig& c) {
  auto cps = c.checkpoints;
  if (cps.empty()) {
    for (double t = 1.0; t <= c.horizon; t += 1.0) {
      cps.push_back(t);
    }
  }
  const auto check = tasep_bijection_check(c.rho, c.particles, c.horizon, cps, c.replicas, c.seed);
  Results res;
  res.criteria.push_back(count_check("tasep bijection mismatches", static_cast<double>(check.mismatches),
                                     0.0, check.mismatches == 0 && check.comparisons > 0,
                                     std::to_string(check.comparisons) + " comparisons"));
  res.rows.push_back(row(c, "tasep/mismatches", kNaN, c.horizon, kNaN, c.replicas,
                         {static_cast<double>(check.mismatches), kNaN, c.replicas}));
  if (c.tagged_replicas > 0) {
    const auto tagged = tagged_particle_suite(c.alpha, c.t_grid, c.tagged_replicas, options(c));
    res.aborted = tagged.aborted;
    add_series_rows(res, c, "tasep/tagged_variance", tagged.variance, c.alpha * c.alpha);
    for (std::size_t k = 0; k < tagged.mean_offset.size(); ++k) {
      res.rows.push_back(row(c, "tasep/tagged_mean_offset", c.alpha * c.alpha, c.t_grid[k], kNaN,
                             tagged.replicas, tagged.mean_offset[k]));
    }
    const auto fit = fit_exponent(tagged.variance);
    res.fits.push_back({"tagged variance", fit});
    res.plots.push_back(plot("tagged_variance", tagged.variance));
    res.criteria.push_back(band("tagged variance slope", fit.slope, 0.55, 0.80));
  }
  return res;
}

Results audit(const RunConfig& c) {
  const auto a = coupling_audit(c.t, c.replicas, options(c));
  Results res;
  res.aborted = a.aborted;
  std::string detail;
  for (const auto& [name, n] : a.violations) {
    detail += name + "=" + std::to_string(n) + " ";
  }
  res.criteria.push_back(count_check("coupling invariants", static_cast<double>(a.total_violations()),
                                     0.0, a.total_violations() == 0, trim(detail)));
  for (const auto& [name, n] : a.replicas) {
    std::size_t found = 0;
    for (const auto& [kind, count] : a.violations) {
      found += kind.rfind(name + "/", 0) == 0 ? count : 0;
    }
    res.rows.push_back(row(c, "audit/" + name + "/violations", kNaN, c.t, kNaN, n,
                           {static_cast<double>(found), kNaN, n}));
  }
  if (c.truncation) {
    TruncationAuditConfig tc;
    tc.replicas = c.replicas;
    tc.two_point_samples = c.replicas;
    tc.two_point_margin = c.twopoint_margin;
    tc.seed = c.seed;
    tc.workers = c.workers;
    for (const auto& check : truncation_audit(tc)) {
      Criterion cr;
      cr.name = "truncation " + check.name;
      cr.lhs = check.doubled.value;
      cr.lhs_stderr = check.doubled.std_error;
      cr.rhs = check.base.value;
      cr.rhs_stderr = check.base.std_error;
      cr.z = kNaN;
      cr.pass = check.pass;
      cr.detail = "|doubled - base| < base stderr";
      res.criteria.push_back(cr);
    }
  }
  return res;
}

std::string csv_row(const ResultRow& r) {
  std::string s = r.experiment;
  for (double x : {r.rho, r.lambda, r.u, r.V, r.t, r.m}) {
    s += "," + num(x);
  }
  s += "," + std::to_string(r.replicas) + "," + num(r.estimate) + "," + num(r.stderr_) + "," +
       std::to_string(r.seed);
  return s;
}

nlohmann::json real(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  if (const char* dir = std::getenv("ZRPLAB_OUT_DIR"); dir && *dir) {
    c.out_dir = dir;
  }
  return c;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(trim(key));
  if (it == table.end()) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  it->second.set(config, it->first, value);
}

void apply_config_text(RunConfig& config, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key=value");
    }
    apply_key(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str());
}

std::string echo_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    out += key + "=" + field.get(config) + "\n";
  }
  return out;
}

void validate_config(const RunConfig& c) {
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  }
  if (c.clock != "race" && c.clock != "per_site") {
    throw ConfigError("clock must be race or per_site");
  }
  if (c.replicas < 1) {
    throw ConfigError("replicas must be at least 1");
  }
  if (c.workers < 1) {
    throw ConfigError("workers must be at least 1");
  }
  if (!(c.rho >= 0.0) || !std::isfinite(c.rho)) {
    throw ConfigError("rho must be a finite nonnegative density");
  }
  if (c.experiment == "lemma41" && !(c.lambda <= c.rho)) {
    throw ConfigError("lambda must not exceed rho");
  }
  if (c.experiment != "simulate" && c.experiment != "tasep" && !(c.t > 0.0)) {
    throw ConfigError("t must be positive");
  }
  scenario_kind(c);
}

bool Results::passed() const {
  return aborted == 0 &&
         std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

Criterion from_report(const IdentityReport& r) {
  Criterion c;
  c.name = r.name;
  c.lhs = r.lhs.value;
  c.lhs_stderr = r.lhs.std_error;
  c.rhs = r.rhs.value;
  c.rhs_stderr = r.rhs.std_error;
  c.z = r.z;
  c.pass = r.pass;
  c.detail = "|z| < 4";
  return c;
}

Results execute(const RunConfig& config) {
  validate_config(config);
  static const std::map<std::string, std::function<Results(const RunConfig&)>> dispatch = {
      {"simulate", simulate}, {"verify", verify},   {"twopoint", twopoint},
      {"scaling", scaling},   {"diffusivity", diffusivity}, {"offchar", offchar},
      {"lemma41", lemma41},   {"tasep", tasep},     {"audit", audit}};
  auto res = dispatch.at(config.experiment)(config);
  res.experiment = config.experiment;
  return res;
}

std::string results_csv(const Results& results) {
  std::string out = "experiment,rho,lambda,u,V,t,m,replicas,estimate,stderr,seed\n";
  for (const auto& r : results.rows) {
    out += csv_row(r) + "\n";
  }
  return out;
}

std::string report_json(const Results& results) {
  nlohmann::json j;
  j["experiment"] = results.experiment;
  j["aborted"] = results.aborted;
  j["pass"] = results.passed();
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : results.criteria) {
    j["criteria"].push_back({{"name", c.name},
                             {"lhs", real(c.lhs)},
                             {"lhs_stderr", real(c.lhs_stderr)},
                             {"rhs", real(c.rhs)},
                             {"rhs_stderr", real(c.rhs_stderr)},
                             {"z", real(c.z)},
                             {"pass", c.pass},
                             {"detail", c.detail}});
  }
  j["fits"] = nlohmann::json::array();
  for (const auto& f : results.fits) {
    j["fits"].push_back({{"name", f.name},
                         {"slope", real(f.fit.slope)},
                         {"intercept", real(f.fit.intercept)},
                         {"slope_stderr", real(f.fit.slope_stderr)},
                         {"t_min", real(f.fit.t_min)},
                         {"t_max", real(f.fit.t_max)}});
  }
  return j.dump(2) + "\n";
}

void emit_outputs(const Results& results, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir / "plotdata", ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                             ec.message());
  }
  write_file(dir / "results.csv", results_csv(results));
  write_file(dir / "report.json", report_json(results));
  write_file(dir / "config.txt", echo_config(config));
  for (const auto& p : results.plots) {
    std::string text = "log_t,log_estimate\n";
    for (const auto& [x, y] : p.points) {
      text += num(x) + "," + num(y) + "\n";
    }
    write_file(dir / "plotdata" / (p.name + ".csv"), text);
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Results res;
  try {
    res = execute(config);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return 2;
  }
  try {
    emit_outputs(res, config);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& c : res.criteria) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << "  lhs=" << num(c.lhs)
        << " rhs=" << num(c.rhs);
    if (!std::isnan(c.z)) {
      out << " z=" << num(c.z);
    }
    if (!c.detail.empty()) {
      out << "  (" << c.detail << ")";
    }
    out << "\n";
  }
  if (res.aborted > 0) {
    out << "ABORTED " << res.aborted << " replicas hit the truncation guard\n";
  }
  out << "wrote " << config.out_dir << "\n";
  return res.passed() ? 0 : 1;
}

}  // namespace zrplab::cli
