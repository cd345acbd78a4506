// Command-line driver for the quadrature-tomography simulator.
//
// Subcommands: first-click, trajectories, calibrate, tomogram, sweep,
// oracle-check, rerun. Options may come from a config file (--config),
// with command-line flags taking precedence.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cqtom/commands.hpp"
#include "cqtom/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CQED quadrature tomography simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  auto capture = [&overrides](const std::string& key) {
    return [&overrides, key](const std::string& v) {
      overrides.emplace_back(key, v);
    };
  };

  const std::vector<std::string> commands = {"first-click", "trajectories",
                                             "calibrate",   "tomogram",
                                             "sweep",       "oracle-check"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option_function<std::string>("--config", [&](const std::string& v) {
      config_path = v;
    });
    sub->add_option_function<std::string>("--state", capture("state"));
    sub->add_option_function<std::string>("--lambda-tau", capture("lambda_tau"));
    sub->add_option_function<std::string>("--n", capture("n"));
    sub->add_option_function<std::string>("--runs,-N", capture("N"));
    sub->add_option_function<std::string>("--phases", capture("phases"));
    sub->add_option_function<std::string>("--alpha", capture("alpha"));
    sub->add_option_function<std::string>("--beta-max", capture("beta_max"));
    sub->add_option_function<std::string>("--Phi", capture("Phi"));
    sub->add_option_function<std::string>("--gamma-mode", capture("gamma_mode"));
    sub->add_option_function<std::string>("--mu", capture("mu"));
    sub->add_option_function<std::string>("--seed", capture("master_seed"));
    sub->add_option_function<std::string>("--dim", capture("dim"));
    sub->add_option_function<std::string>("--grid-lo", capture("grid_lo"));
    sub->add_option_function<std::string>("--grid-hi", capture("grid_hi"));
    sub->add_option_function<std::string>("--grid-h", capture("grid_h"));
    sub->add_option_function<std::string>("--epsilon", capture("epsilon"));
    sub->add_option_function<std::string>("--out", capture("out_dir"));
    sub->add_option_function<std::string>("--threads", capture("threads"));
    sub->add_option_function<std::string>("--sweep-n", capture("sweep_n"));
    sub->add_option_function<std::string>("--track-count",
                                          capture("track_count"));
    sub->add_option_function<std::string>("--calibration",
                                          capture("calibration"));
    sub->add_option_function<std::string>("--enumeration-cap",
                                          capture("enumeration_cap"));
  }

  std::string manifest_path, rerun_out;
  CLI::App* rerun = app.add_subcommand("rerun", "re-execute a recorded run");
  rerun->add_option("manifest", manifest_path, "path to a run manifest")
      ->required();
  rerun->add_option("--out", rerun_out, "override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rerun->parsed())
      return cqtom::cli::rerun_from_manifest(manifest_path, rerun_out);
    cqtom::cli::ExperimentConfig cfg;
    if (!config_path.empty()) cqtom::cli::apply_config_file(cfg, config_path);
    for (const auto& [key, value] : overrides)
      cqtom::cli::apply_key(cfg, key, value);
    return cqtom::cli::run_command(app.get_subcommands().at(0)->get_name(),
                                   cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
