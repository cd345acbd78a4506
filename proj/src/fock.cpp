#include "cqtom/fock.hpp"

#include <cmath>
#include <string>

namespace cqtom::fock {

double poisson_tail(double mean, int from) {
  if (mean <= 0.0) return from <= 0 ? 1.0 : 0.0;
  // first term via logs, then the term recurrence
  double log_t = -mean + from * std::log(mean) - std::lgamma(from + 1.0);
  double term = std::exp(log_t);
  double sum = 0.0;
  for (int k = from; k < from + 2000; ++k) {
    sum += term;
    term *= mean / (k + 1);
    if (term < 1e-300 || term < 1e-18 * sum) break;
  }
  return sum;
}

int min_dim_for_coherent(double beta_abs, double tol) {
  const double mean = beta_abs * beta_abs;
  int d = 2;
  while (poisson_tail(mean, d) >= tol) ++d;
  return d;
}

int default_dim(double beta_max) {
  const int rule = static_cast<int>(
      std::ceil(beta_max * beta_max + 6.0 * beta_max + 10.0));
  return std::max({rule, min_dim_for_coherent(beta_max), 2});
}

Vector coherent_state(Complex beta, int dim, double tol) {
  if (dim < 2) throw TruncationError("coherent_state: dim must be >= 2");
  const double mean = std::norm(beta);
  if (poisson_tail(mean, dim) >= tol) {
    throw TruncationError(
        "coherent_state: truncated tail weight exceeds tolerance, need dim >= " +
        std::to_string(min_dim_for_coherent(std::abs(beta), tol)));
  }
  Vector psi(dim);
  Complex amp = std::exp(-0.5 * mean);
  for (int k = 0; k < dim; ++k) {
    psi[k] = amp;
    amp *= beta / std::sqrt(k + 1.0);
  }
  psi.normalize();
  return psi;
}

Vector fock_state(int k, int dim) {
  if (k < 0 || k >= dim)
    throw IndexError("fock_state: photon number outside truncated basis");
  Vector psi = Vector::Zero(dim);
  psi[k] = 1.0;
  return psi;
}

Matrix annihilation(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix number_function(const std::function<double(int)>& g, int dim) {
  Matrix op = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) op(n, n) = g(n);
  return op;
}

Matrix quadrature_operator(double phi, int dim) {
  const Matrix a = annihilation(dim);
  const Complex e{std::cos(phi), std::sin(phi)};
  return (a.adjoint() * e + a * std::conj(e)) / std::sqrt(2.0);
}

Matrix density_from_pure(const Vector& psi) { return psi * psi.adjoint(); }

double trace_of(const Matrix& rho) { return rho.trace().real(); }

Complex expectation(const Matrix& op, const Matrix& rho) {
  return (op * rho).trace();
}

Matrix renormalized(const Matrix& rho) {
  Matrix sym = 0.5 * (rho + rho.adjoint());
  const double tr = sym.trace().real();
  if (tr < 1e-14) throw DegenerateState("renormalized: trace below 1e-14");
  return sym / tr;
}

}  // namespace cqtom::fock
