#include "cqtom/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqtom/trajectory.hpp"

namespace cqtom::calib {

double nu_of(double lambda_tau, double mu, double gamma) {
  if ((1.0 + mu) * gamma <= 0.0)
    throw NonpositiveNu("nu_of: (1 + mu) * Gamma must be positive");
  return gamma * lambda_tau * (1.0 + mu) / std::numbers::sqrt2;
}

double p_bar(double beta_abs, double Phi, double phi, double lambda_tau,
             double mu, double gamma) {
  const double nu = nu_of(lambda_tau, mu, gamma);
  const double p =
      0.5 * (1.0 + nu * std::numbers::sqrt2 * beta_abs * std::cos(Phi - phi));
  if (p <= 0.0 || p >= 1.0)
    throw OutOfRange("p_bar: mean click probability left (0, 1)");
  return p;
}

std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(n + 1);
  // log form for the anchor term, recurrence for the rest
  const double logp = std::log(p), logq = std::log1p(-p);
  pmf[0] = std::exp(n * logq);
  for (int m = 1; m <= n; ++m)
    pmf[m] = std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) -
                      std::lgamma(n - m + 1.0) + m * logp + (n - m) * logq);
  return pmf;
}

double gaussian_pdf_m(int n, double p, double m) {
  const double var = n * p * (1.0 - p);
  const double d = m - n * p;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double theoretical_cdf_m(int n, double p, double x) {
  if (x < 0.0) return 0.0;
  if (x >= n) return 1.0;
  const auto pmf = binomial_pmf(n, p);
  const int top = static_cast<int>(std::floor(x));
  double f = 0.0;
  for (int m = 0; m <= top; ++m) f += pmf[m];
  return std::min(f, 1.0);
}

double empirical_cdf(std::span<const double> samples, double x) {
  if (samples.empty()) throw EmptySample("empirical_cdf: no samples");
  std::size_t count = 0;
  for (double s : samples)
    if (s <= x) ++count;
  return static_cast<double>(count) / samples.size();
}

double kolmogorov_bound(double alpha, int N) {
  return std::sqrt(0.5 * std::log(2.0 / (1.0 - alpha))) / std::sqrt(double(N));
}

double ks_statistic_discrete(std::span<const int> samples, int n,
                             std::span<const double> pmf) {
  if (samples.empty()) throw EmptySample("ks_statistic_discrete: no samples");
  std::vector<int> counts(n + 1, 0);
  for (int s : samples) counts[std::clamp(s, 0, n)]++;
  double femp = 0.0, ftheo = 0.0, sup = 0.0;
  const double inv = 1.0 / samples.size();
  for (int m = 0; m <= n; ++m) {
    femp += counts[m] * inv;
    ftheo += pmf[m];
    sup = std::max(sup, std::abs(femp - ftheo));
  }
  return sup;
}

double ks_statistic_sorted(std::span<const double> sorted,
                           const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw EmptySample("ks_statistic_sorted: no samples");
  const double inv = 1.0 / sorted.size();
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    sup = std::max({sup, std::abs((i + 1) * inv - f), std::abs(i * inv - f)});
  }
  return sup;
}

double ks_statistic(std::span<const int> samples, int n, double p) {
  const auto pmf = binomial_pmf(n, p);
  return ks_statistic_discrete(samples, n, pmf);
}

double sigma_of(int n, double nu) {
  if (nu <= 0.0) throw NonpositiveNu("sigma_of: nu must be positive");
  return 1.0 / (n * nu * nu);
}

double sigma_s_of(double sigma) {
  const double s = sigma - 0.5;
  if (s <= 0.0)
    throw NonpositiveInstrumentVariance(
        "sigma_s_of: sigma <= 1/2; n too large for this nu");
  return s;
}

CalibrationResult fit_mu(std::span<const int> samples,
                         const CalibrationInput& input) {
  const double gamma = meas::gamma_factor(input.gamma_mode, input.beta_max,
                                          input.lambda_tau);
  const int steps =
      static_cast<int>(std::round((input.mu_hi - input.mu_lo) / input.mu_step));
  CalibrationResult best;
  bool have_best = false;
  for (int i = 0; i <= steps; ++i) {
    const double mu = input.mu_lo + i * input.mu_step;
    double p;
    try {
      p = p_bar(input.beta_max, input.Phi, input.phi, input.lambda_tau, mu,
                gamma);
    } catch (const std::runtime_error&) {
      continue;  // grid point outside the model's validity
    }
    const double ks = ks_statistic(samples, input.n, p);
    const bool better =
        !have_best || ks < best.ks_statistic - 1e-15 ||
        (std::abs(ks - best.ks_statistic) <= 1e-15 &&
         std::abs(mu) < std::abs(best.mu));
    if (better) {
      best.mu = mu;
      best.ks_statistic = ks;
      best.p_bar = p;
      best.nu = nu_of(input.lambda_tau, mu, gamma);
      have_best = true;
    }
  }
  if (!have_best) throw OutOfRange("fit_mu: empty mu grid");
  best.sigma = sigma_of(input.n, best.nu);
  best.sigma_s = best.sigma - 0.5;  // raw; guard lives in sigma_s_of
  best.ks_bound = kolmogorov_bound(input.alpha, static_cast<int>(samples.size()));
  best.accepted = best.ks_statistic < best.ks_bound;
  return best;
}

std::vector<SweepRow> sigma_s_vs_n_sweep(const CalibrationInput& base,
                                         std::span<const int> ns,
                                         std::uint64_t master_seed, int dim,
                                         int threads) {
  const int d = dim > 0 ? dim : fock::default_dim(base.beta_max);
  const fock::Complex beta =
      base.beta_max * fock::Complex{std::cos(base.Phi), std::sin(base.Phi)};
  const auto state = traj::InitialState::pure(fock::coherent_state(beta, d));
  const meas::BandedKraus bk({base.lambda_tau, base.phi, base.Phi, d});
  std::vector<SweepRow> rows;
  for (int n : ns) {
    traj::RunConfig cfg{n, base.N, master_seed, false, threads};
    const auto ens = traj::run_ensemble(state, bk, cfg);
    CalibrationInput in = base;
    in.n = n;
    const CalibrationResult r = fit_mu(ens.clicks, in);
    rows.push_back(
        {n, r.mu, r.sigma, r.sigma_s, r.sigma_s > 0.0, r.accepted});
  }
  return rows;
}

}  // namespace cqtom::calib
