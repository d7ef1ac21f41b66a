#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zrplab/experiments.hpp"

namespace zrplab::cli {

inline const std::vector<std::string> kExperiments = {
    "simulate", "verify", "twopoint", "scaling", "diffusivity",
    "offchar",  "lemma41", "tasep",   "audit"};

/// Every field has a default; file values override defaults and flags
/// override file values.
struct RunConfig {
  std::string experiment = "simulate";
  std::string scenario = "muhat";  // simulate: stationary | muhat | three | segment
  double rho = 1.0;
  double lambda = 0.5;
  std::int64_t u = 5;
  double horizon = 100.0;
  std::vector<double> checkpoints;
  std::vector<double> speeds;  // observer speeds V; empty = experiment default
  std::uint64_t seed = 1;
  double margin_factor = 1.0;
  std::string clock = "race";
  double t = 200.0;
  std::vector<double> t_grid = {125.0, 250.0, 500.0, 1000.0, 2000.0};
  double m = 1.0;
  std::size_t replicas = 1000;
  std::size_t workers = 1;
  std::int64_t site_range = 74;
  double twopoint_margin = 4.0;
  double alpha = 0.5;
  std::size_t particles = 50;
  std::size_t tagged_replicas = 0;
  bool desync = false;
  bool truncation = false;
  std::string out_dir = "zrplab_out";
};

/// Defaults with out_dir taken from ZRPLAB_OUT_DIR when set.
RunConfig default_config();

/// Sets one key from its text form. Throws ConfigError for unknown keys and
/// malformed values.
void apply_key(RunConfig& config, const std::string& key, const std::string& value);

/// Flat key=value text, one key per line; '#' starts a comment.
void apply_config_text(RunConfig& config, const std::string& text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Resolved configuration in the same key=value format, keys sorted.
std::string echo_config(const RunConfig& config);

/// Checks the cross-field constraints. Throws ConfigError.
void validate_config(const RunConfig& config);

struct ResultRow {
  std::string experiment;
  double rho = 0.0;
  double lambda = 0.0;  // NaN when not applicable
  double u = 0.0;
  double V = 0.0;
  double t = 0.0;
  double m = 0.0;
  std::size_t replicas = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;
};

struct Criterion {
  std::string name;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double rhs_stderr = 0.0;
  double z = 0.0;  // NaN for band and count checks
  bool pass = false;
  std::string detail;
};

struct FitRecord {
  std::string name;
  ExponentFit fit;
};

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (log t, log estimate)
};

struct Results {
  std::string experiment;
  std::vector<ResultRow> rows;
  std::vector<Criterion> criteria;
  std::vector<FitRecord> fits;
  std::vector<PlotSeries> plots;
  std::size_t aborted = 0;

  /// True when every criterion passed and no replica was aborted.
  [[nodiscard]] bool passed() const;
};

Criterion from_report(const IdentityReport& report);

/// Runs the configured experiment. Throws ConfigError / std::domain_error
/// for invalid parameters.
Results execute(const RunConfig& config);

/// results.csv, report.json, plotdata/*.csv and config.txt in out_dir.
/// Throws std::runtime_error when the directory cannot be written.
void emit_outputs(const Results& results, const RunConfig& config);

std::string results_csv(const Results& results);
std::string report_json(const Results& results);

/// Executes, writes outputs and prints one line per criterion to `out`.
/// Exit code 0 when all checks pass, 1 on failures or truncation aborts,
/// 2 on usage or configuration errors.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace zrplab::cli
