#include "cqtom/measurement.hpp"

#include <cmath>
#include <string>

namespace cqtom::meas {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

fock::Matrix cos_op(double lt, int dim) {
  return fock::number_function(
      [lt](int n) { return std::cos(lt * std::sqrt(double(n))); }, dim);
}

// S = sin(lt sqrt(n))/sqrt(n), with the n=0 entry fixed to its limit lt.
fock::Matrix sinc_op(double lt, int dim) {
  return fock::number_function(
      [lt](int n) {
        if (n == 0) return lt;
        const double r = std::sqrt(double(n));
        return std::sin(lt * r) / r;
      },
      dim);
}

}  // namespace

KrausPair build_kraus(const InteractionParams& params) {
  const int d = params.dim;
  const fock::Matrix a = fock::annihilation(d);
  const fock::Matrix c = cos_op(params.lambda_tau, d);
  const fock::Matrix as = a * sinc_op(params.lambda_tau, d);
  const fock::Complex ph{std::cos(params.phi), -std::sin(params.phi)};
  KrausPair kp;
  kp.k00 = kInvSqrt2 * (c - ph * as);
  kp.k10 = kInvSqrt2 * (c + ph * as);
  kp.params = params;
  return kp;
}

KrausPair kraus_from_unitaries(const InteractionParams& params) {
  const int d = params.dim;
  const fock::Complex im{0.0, 1.0};
  // Joint basis |atom, n>: index atom*d + n, atom 0 = lower, 1 = upper.
  fock::Matrix u_af = fock::Matrix::Zero(2 * d, 2 * d);
  u_af(0, 0) = 1.0;  // |0,0> is uncoupled
  for (int n = 1; n < d; ++n) {
    // resonant block {|0,n>, |1,n-1>} with Rabi angle lt*sqrt(n)
    const double th = params.lambda_tau * std::sqrt(double(n));
    const int lo = n, hi = d + n - 1;
    u_af(lo, lo) = std::cos(th);
    u_af(hi, hi) = std::cos(th);
    u_af(lo, hi) = -im * std::sin(th);
    u_af(hi, lo) = -im * std::sin(th);
  }
  // States |1, d-1>: the partner |0, d> is outside the truncated basis, so
  // the block is left as identity; K_{i0} never reaches it from atom state 0.
  for (int n = 0; n < d; ++n)
    if (u_af(d + n, d + n) == 0.0) u_af(d + n, d + n) = 1.0;

  // U_a = exp(-i V_a dt) with f*dt = pi/4: (I - i M)/sqrt(2) on the atom,
  // M = e^{-i phi}|0><1| + e^{i phi}|1><0|.
  const fock::Complex e{std::cos(params.phi), std::sin(params.phi)};
  Eigen::Matrix2cd r;
  r << 1.0, -im * std::conj(e), -im * e, 1.0;
  r *= kInvSqrt2;
  fock::Matrix u_a = fock::Matrix::Zero(2 * d, 2 * d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      u_a.block(i * d, j * d, d, d) =
          r(i, j) * fock::Matrix::Identity(d, d);

  const fock::Matrix u = u_a * u_af;
  KrausPair kp;
  kp.k00 = u.block(0, 0, d, d);
  kp.k10 = u.block(d, 0, d, d);
  kp.params = params;
  return kp;
}

std::pair<double, double> detection_probabilities(const fock::Matrix& rho,
                                                  const KrausPair& kp) {
  const double p0 = (kp.k00 * rho * kp.k00.adjoint()).trace().real();
  const double p1 = (kp.k10 * rho * kp.k10.adjoint()).trace().real();
  return {p0, p1};
}

Reduction reduce(const fock::Matrix& rho, int outcome, const KrausPair& kp) {
  const fock::Matrix& k = outcome ? kp.k10 : kp.k00;
  fock::Matrix mapped = k * rho * k.adjoint();
  const double p = mapped.trace().real();
  if (p <= 1e-14)
    throw ImpossibleOutcome("reduce: outcome probability below 1e-14");
  return {fock::renormalized(mapped), p};
}

double gamma_series(double beta_abs, double lambda_tau, double tail_tol) {
  const double mean = beta_abs * beta_abs;
  const int cutoff = std::max(2, fock::min_dim_for_coherent(beta_abs, tail_tol));
  double weight = std::exp(-mean);  // Poisson(0)
  double sum = 0.0;
  for (int m = 0; m < cutoff; ++m) {
    const double arg = lambda_tau * std::sqrt(m + 1.0);
    sum += std::cos(lambda_tau * std::sqrt(double(m))) * std::sin(arg) / arg *
           weight;
    weight *= mean / (m + 1);
  }
  return sum;
}

double gamma_approx(double beta_abs, double lambda_tau) {
  return 1.0 - lambda_tau * lambda_tau *
                   (2.0 / 3.0 * beta_abs * beta_abs + 1.0 / 6.0);
}

double gamma_factor(GammaMode mode, double beta_abs, double lambda_tau) {
  switch (mode) {
    case GammaMode::kSeries:
      return gamma_series(beta_abs, lambda_tau);
    case GammaMode::kApprox:
      return gamma_approx(beta_abs, lambda_tau);
    case GammaMode::kUnity:
      return 1.0;
  }
  return 1.0;
}

double first_click_probability(fock::Complex beta,
                               const InteractionParams& params,
                               GammaMode mode) {
  const double babs = std::abs(beta);
  if (babs == 0.0) return 0.5;
  const double gamma = gamma_factor(mode, babs, params.lambda_tau);
  const double delta = std::arg(beta) - params.phi;
  return 0.5 *
         (1.0 + 2.0 * params.lambda_tau * babs * gamma * std::cos(delta));
}

namespace {

void enumerate_rec(const fock::Matrix& rho, const KrausPair& kp, int depth,
                   int clicks, std::vector<double>& out) {
  if (depth == 0) {
    out[clicks] += rho.trace().real();
    return;
  }
  // fixed branch order keeps the accumulation deterministic
  enumerate_rec(kp.k00 * rho * kp.k00.adjoint(), kp, depth - 1, clicks, out);
  enumerate_rec(kp.k10 * rho * kp.k10.adjoint(), kp, depth - 1, clicks + 1,
                out);
}

}  // namespace

std::vector<double> enumerate_integrated_probability(const fock::Matrix& rho0,
                                                     const KrausPair& kp,
                                                     int n, int cap) {
  if (n > cap)
    throw SizeError("enumerate_integrated_probability: n = " +
                    std::to_string(n) + " exceeds cap " + std::to_string(cap));
  std::vector<double> out(n + 1, 0.0);
  enumerate_rec(rho0, kp, n, 0, out);
  return out;
}

BandedKraus::BandedKraus(const InteractionParams& params) : params_(params) {
  const int d = params.dim;
  cos_diag_.resize(d);
  sin_super_.resize(d - 1);
  for (int n = 0; n < d; ++n)
    cos_diag_[n] = std::cos(params.lambda_tau * std::sqrt(double(n)));
  for (int n = 0; n < d - 1; ++n)
    sin_super_[n] = std::sin(params.lambda_tau * std::sqrt(n + 1.0));
  phase_ = {std::cos(params.phi), -std::sin(params.phi)};
}

void BandedKraus::apply(int outcome, const fock::Vector& in,
                        fock::Vector& out) const {
  const int d = dim();
  out.resize(d);
  const fock::Complex ph = outcome ? phase_ : -phase_;
  for (int n = 0; n < d - 1; ++n)
    out[n] = kInvSqrt2 * (cos_diag_[n] * in[n] + ph * sin_super_[n] * in[n + 1]);
  out[d - 1] = kInvSqrt2 * cos_diag_[d - 1] * in[d - 1];
}

}  // namespace cqtom::meas
