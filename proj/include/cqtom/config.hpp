#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqtom/errors.hpp"
#include "cqtom/trajectory.hpp"

namespace cqtom::cli {

struct StateComponent {
  enum Kind { kCoherent, kFock } kind = kCoherent;
  double weight = 1.0;
  double beta_abs = 0.0;  // coherent
  double Phi = 0.0;       // coherent
  int k = 0;              // fock
};

/// Grammar: coherent(BETA_ABS,PHI) | fock(K) |
///          mixed(W1*SPEC1 + W2*SPEC2 + ...). Weights are renormalized.
struct StateSpec {
  std::vector<StateComponent> components;
  std::string text;  // the spec string as given

  bool is_single_coherent() const;
  double max_beta_abs() const;
};

StateSpec parse_state(const std::string& text);

struct ExperimentConfig {
  StateSpec state;
  double lambda_tau = 0.04;
  int n = 300;
  int N = 1000;
  std::vector<double> phases;  // quadrature phases phi
  double alpha = 0.95;
  double beta_max = 3.0;
  double Phi = 0.0;  // reference coherent phase for calibration, default pi/4
  std::string gamma_mode = "unity";  // series | approx | unity
  std::optional<double> mu;          // override of the fitting parameter
  std::uint64_t master_seed = 1;
  std::optional<int> dim;
  double grid_lo = -6.0, grid_hi = 6.0, grid_h = 0.05;
  double epsilon = 1e-4;
  std::string out_dir;  // default: $CQTOM_OUT or "out"
  int threads = 0;
  int enumeration_cap = 14;
  int track_count = 5;         // trajectories emitted by the track command
  std::vector<int> sweep_n;    // defaults to 100..1000 step 100
  std::string calibration_path;  // calibration JSON consumed by tomogram

  ExperimentConfig();
};

/// Flat key-value file with [sections]; '#' and ';' start comments.
/// Recognized sections: [experiment], [deconvolution], [sweep], [output].
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

meas::GammaMode gamma_mode_of(const std::string& name);

/// Truncation dimension for this run: explicit override, else the coherent
/// truncation rule on the largest amplitude present (with a floor for Fock
/// components).
int resolve_dim(const ExperimentConfig& cfg);

/// Builds the initial cavity state at the resolved dimension.
traj::InitialState build_state(const StateSpec& spec, int dim);

}  // namespace cqtom::cli
