#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zrplab/cli.hpp"
#include "zrplab/errors.hpp"

int main(int argc, char** argv) {
  using namespace zrplab::cli;

  CLI::App app{"Coupled totally asymmetric zero range process simulations"};
  std::string experiment;
  std::string config_file;
  app.add_option("experiment", experiment,
                 "simulate | verify | twopoint | scaling | diffusivity | offchar | lemma41 | "
                 "tasep | audit")
      ->required();
  app.add_option("--config", config_file, "flat key=value config file");

  // Flag name -> config key. Every flag is kept as text and applied after
  // the config file so that flags win.
  const std::map<std::string, std::string> flags = {
      {"--scenario", "scenario"},
      {"--rho", "rho"},
      {"--lambda", "lambda"},
      {"--u", "u"},
      {"--horizon", "horizon"},
      {"--checkpoints", "checkpoints"},
      {"--V", "V"},
      {"--seed", "seed"},
      {"--margin-factor", "margin_factor"},
      {"--clock", "clock"},
      {"--t", "t"},
      {"--t-grid", "t_grid"},
      {"--m", "m"},
      {"--replicas", "replicas"},
      {"--workers", "workers"},
      {"--site-range", "site_range"},
      {"--twopoint-margin", "twopoint_margin"},
      {"--alpha", "alpha"},
      {"--particles", "particles"},
      {"--tagged-replicas", "tagged_replicas"},
      {"--desync", "desync"},
      {"--truncation", "truncation"},
      {"--out-dir", "out_dir"},
  };
  std::map<std::string, std::optional<std::string>> values;
  for (const auto& [flag, key] : flags) {
    app.add_option(flag, values[key], "sets " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  RunConfig config = default_config();
  try {
    if (!config_file.empty()) {
      apply_config_file(config, config_file);
    }
    config.experiment = experiment;
    for (const auto& [key, value] : values) {
      if (value) {
        apply_key(config, key, *value);
      }
    }
  } catch (const zrplab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  return run_command(config, std::cout, std::cerr);
}
