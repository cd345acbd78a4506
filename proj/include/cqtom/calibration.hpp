#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cqtom/measurement.hpp"

// Statistical layer: the Bernoulli/Moivre-Laplace model of the integrated
// click count, the Kolmogorov goodness-of-fit machinery, and the mu-fit that
// calibrates the quadrature mapping on a coherent reference state.

namespace cqtom::calib {

struct CalibrationInput {
  double lambda_tau;
  double beta_max;
  double Phi;
  double phi;
  int n;
  int N;
  double alpha = 0.95;
  meas::GammaMode gamma_mode = meas::GammaMode::kUnity;
  double mu_lo = -1.0;
  double mu_hi = 1.0;
  double mu_step = 0.01;
};

struct CalibrationResult {
  double mu = 0.0;
  double nu = 0.0;
  double p_bar = 0.5;
  double sigma = 0.0;
  double sigma_s = 0.0;  // sigma - 1/2, may be <= 0 when n is too large
  double ks_statistic = 0.0;
  double ks_bound = 0.0;
  bool accepted = false;
};

/// nu = Gamma * lambda_tau * (1 + mu) / sqrt(2).
/// Throws NonpositiveNu when (1 + mu) * Gamma <= 0.
double nu_of(double lambda_tau, double mu, double gamma);

/// Mean click probability (1 + nu sqrt(2) |beta| cos(Phi - phi)) / 2.
/// Throws OutOfRange if the value leaves (0, 1).
double p_bar(double beta_abs, double Phi, double phi, double lambda_tau,
             double mu, double gamma);

/// Binomial(n, p) pmf over m = 0..n; sums to 1 within 1e-12.
std::vector<double> binomial_pmf(int n, double p);

/// Moivre-Laplace normal density in m, mean n*p, variance n*p*(1-p).
double gaussian_pdf_m(int n, double p, double m);

/// Exact binomial CDF at real x.
double theoretical_cdf_m(int n, double p, double x);

/// Step CDF (1/N) sum I(sample <= x). Throws EmptySample.
double empirical_cdf(std::span<const double> samples, double x);

/// Kolmogorov level sqrt(ln(2/(1-alpha))/2) / sqrt(N).
double kolmogorov_bound(double alpha, int N);

/// Sup-norm distance between the empirical CDF of integer samples and the
/// CDF of the given pmf; both step at integers so the sup is over m = 0..n.
double ks_statistic_discrete(std::span<const int> samples, int n,
                             std::span<const double> pmf);

/// Sup-norm distance of sorted real samples against a continuous CDF,
/// checking both one-sided limits at every jump.
double ks_statistic_sorted(std::span<const double> sorted,
                           const std::function<double(double)>& cdf);

/// Convenience form: discrete KS against binomial(n, p).
double ks_statistic(std::span<const int> samples, int n, double p);

/// sigma = 1 / (n nu^2).
double sigma_of(int n, double nu);

/// sigma_s = sigma - 1/2. Throws NonpositiveInstrumentVariance if sigma <= 1/2
/// (the chosen n is too large for this nu; the instrumental model breaks).
double sigma_s_of(double sigma);

/// Grid search of mu minimizing the KS statistic of the samples against
/// binomial(n, p_bar(mu)). Ties break toward smaller |mu|, then smaller mu.
/// Always returns a result; accepted=false when the minimum exceeds the bound.
CalibrationResult fit_mu(std::span<const int> samples,
                         const CalibrationInput& input);

struct SweepRow {
  int n;
  double mu;
  double sigma;
  double sigma_s;
  bool instrument_ok;  // false flags sigma_s <= 0
  bool accepted;
};

/// Runs a fresh ensemble and mu-fit per n and tabulates sigma_s(n).
std::vector<SweepRow> sigma_s_vs_n_sweep(const CalibrationInput& base,
                                         std::span<const int> ns,
                                         std::uint64_t master_seed,
                                         int dim = 0, int threads = 0);

}  // namespace cqtom::calib
