#pragma once

#include <string>

#include "cqtom/config.hpp"

namespace cqtom::cli {

int cmd_first_click(const ExperimentConfig& cfg);
int cmd_trajectories(const ExperimentConfig& cfg);
int cmd_calibrate(const ExperimentConfig& cfg);
int cmd_tomogram(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_oracle_check(const ExperimentConfig& cfg);

/// Dispatch by subcommand name; used by the driver and by manifest reruns.
int run_command(const std::string& name, const ExperimentConfig& cfg);

/// Re-executes the command recorded in a manifest; outputs land in out_dir
/// (the recorded one unless overridden).
int rerun_from_manifest(const std::string& manifest_path,
                        const std::string& out_override);

}  // namespace cqtom::cli
