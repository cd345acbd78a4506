#include "cqtom/trajectory.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace cqtom::traj {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 trajectory_engine(std::uint64_t master_seed,
                                  std::uint64_t index) {
  return std::mt19937_64(
      splitmix64(master_seed + index * 0x9E3779B97F4A7C15ull));
}

double unit_draw(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

InitialState InitialState::pure(fock::Vector psi) {
  InitialState s;
  s.components.emplace_back(1.0, std::move(psi));
  return s;
}

fock::Matrix InitialState::density() const {
  fock::Matrix rho = fock::Matrix::Zero(dim(), dim());
  for (const auto& [w, psi] : components) rho += w * psi * psi.adjoint();
  return rho;
}

int InitialState::dim() const {
  return static_cast<int>(components.at(0).second.size());
}

TrajectoryRecord run_trajectory(const fock::Vector& psi0,
                                const meas::BandedKraus& bk, int n,
                                std::mt19937_64& rng, bool record_track) {
  TrajectoryRecord rec;
  rec.outcomes.resize(n);
  if (record_track) rec.p1_track.resize(n);
  fock::Vector psi = psi0;
  fock::Vector branch1(bk.dim()), branch0(bk.dim());
  for (int k = 0; k < n; ++k) {
    bk.apply(1, psi, branch1);
    const double p1 = branch1.squaredNorm();
    if (record_track) rec.p1_track[k] = p1;
    const double u = unit_draw(rng);
    const int outcome = (u <= p1) ? 1 : 0;
    if (outcome) {
      psi.swap(branch1);
    } else {
      bk.apply(0, psi, branch0);
      psi.swap(branch0);
    }
    const double norm2 = psi.squaredNorm();
    if (norm2 <= 1e-14)
      throw ImpossibleOutcome("run_trajectory: drawn branch has zero weight");
    psi /= std::sqrt(norm2);
    rec.outcomes[k] = static_cast<std::uint8_t>(outcome);
    rec.m += outcome;
  }
  return rec;
}

TrajectoryRecord run_trajectory_dense(const fock::Matrix& rho0,
                                      const meas::KrausPair& kp, int n,
                                      std::mt19937_64& rng,
                                      bool record_track) {
  TrajectoryRecord rec;
  rec.outcomes.resize(n);
  if (record_track) rec.p1_track.resize(n);
  fock::Matrix rho = rho0;
  for (int k = 0; k < n; ++k) {
    const auto [p0, p1] = meas::detection_probabilities(rho, kp);
    if (record_track) rec.p1_track[k] = p1;
    const double u = unit_draw(rng);
    const int outcome = (u <= p1) ? 1 : 0;
    rho = meas::reduce(rho, outcome, kp).rho;
    rec.outcomes[k] = static_cast<std::uint8_t>(outcome);
    rec.m += outcome;
  }
  return rec;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CQTOM_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

TrajectoryRecord one_member(const InitialState& state,
                            const meas::BandedKraus& bk,
                            const RunConfig& config, int index) {
  auto rng = trajectory_engine(config.master_seed,
                               static_cast<std::uint64_t>(index));
  const fock::Vector* psi0 = &state.components[0].second;
  if (state.components.size() > 1) {
    const double u = unit_draw(rng);
    double acc = 0.0;
    for (const auto& [w, psi] : state.components) {
      acc += w;
      psi0 = &psi;
      if (u < acc) break;
    }
  }
  return run_trajectory(*psi0, bk, config.n, rng,
                        config.record_probability_track);
}

}  // namespace

EnsembleResult run_ensemble(const InitialState& state,
                            const meas::BandedKraus& bk,
                            const RunConfig& config) {
  EnsembleResult res;
  res.clicks.resize(config.N);
  if (config.record_probability_track) res.records.resize(config.N);
  const int threads = std::min(resolve_threads(config.threads), config.N);
  auto worker = [&](int first, int step) {
    for (int i = first; i < config.N; i += step) {
      TrajectoryRecord rec = one_member(state, bk, config, i);
      res.clicks[i] = rec.m;
      if (config.record_probability_track) res.records[i] = std::move(rec);
    }
  };
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }
  return res;
}

std::vector<TrackPoint> probability_track(const InitialState& state,
                                          const meas::BandedKraus& bk, int n,
                                          std::uint64_t master_seed,
                                          int n_trajectories) {
  RunConfig cfg{n, n_trajectories, master_seed, true, 1};
  EnsembleResult res = run_ensemble(state, bk, cfg);
  std::vector<TrackPoint> table;
  table.reserve(static_cast<std::size_t>(n) * n_trajectories);
  for (int i = 0; i < n_trajectories; ++i)
    for (int k = 0; k < n; ++k)
      table.push_back({i, k + 1, res.records[i].p1_track[k]});
  return table;
}

}  // namespace cqtom::traj
