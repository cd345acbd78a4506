#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cqtom/measurement.hpp"

// Seeded Monte Carlo engine. Every trajectory owns an independent RNG stream
// derived from (master_seed, trajectory index), so ensembles are bit-identical
// regardless of thread count or execution order.

namespace cqtom::traj {

struct RunConfig {
  int n;                     // probes per run
  int N;                     // runs in the ensemble
  std::uint64_t master_seed = 1;
  bool record_probability_track = false;
  int threads = 0;           // 0: CQTOM_THREADS env, else hardware concurrency
};

struct TrajectoryRecord {
  std::vector<std::uint8_t> outcomes;
  int m = 0;                    // click count, popcount of outcomes
  std::vector<double> p1_track; // a-priori p1 before each draw, if recorded
};

std::uint64_t splitmix64(std::uint64_t x);

/// Engine for substream `index` of `master_seed` (splitmix64 of the
/// golden-ratio-strided counter; documented so runs are reproducible).
std::mt19937_64 trajectory_engine(std::uint64_t master_seed,
                                  std::uint64_t index);

/// 53-bit uniform draw in [0, 1).
double unit_draw(std::mt19937_64& rng);

/// Initial cavity state as a spectral mixture of pure components. Mixed
/// states are simulated exactly by drawing a component per trajectory
/// (first draw of the stream, consumed only when there is more than one).
struct InitialState {
  std::vector<std::pair<double, fock::Vector>> components;  // (weight, psi)

  static InitialState pure(fock::Vector psi);
  fock::Matrix density() const;
  int dim() const;
};

/// One experiment on a pure initial state: n sequential probes with
/// Bernoulli(p1) draws and state reduction. A draw u == p1 counts as a click.
TrajectoryRecord run_trajectory(const fock::Vector& psi0,
                                const meas::BandedKraus& bk, int n,
                                std::mt19937_64& rng,
                                bool record_track = false);

/// Dense density-matrix variant, for mixed inputs and as a cross-check path.
TrajectoryRecord run_trajectory_dense(const fock::Matrix& rho0,
                                      const meas::KrausPair& kp, int n,
                                      std::mt19937_64& rng,
                                      bool record_track = false);

struct EnsembleResult {
  std::vector<int> clicks;               // m per trajectory, by index
  std::vector<TrajectoryRecord> records; // filled when tracks are recorded
};

EnsembleResult run_ensemble(const InitialState& state,
                            const meas::BandedKraus& bk,
                            const RunConfig& config);

struct TrackPoint {
  int trajectory;
  int step;   // 1-based probe number
  double p1;
};

/// Per-step a-priori click probabilities for a handful of trajectories.
std::vector<TrackPoint> probability_track(const InitialState& state,
                                          const meas::BandedKraus& bk, int n,
                                          std::uint64_t master_seed,
                                          int n_trajectories);

int resolve_threads(int requested);

}  // namespace cqtom::traj
