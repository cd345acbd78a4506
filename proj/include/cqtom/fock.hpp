#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "cqtom/errors.hpp"

// Truncated Fock-space linear algebra for a single cavity mode.
// All values are plain Eigen objects, immutable by convention; everything
// here is safe to copy and share across threads.

namespace cqtom::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kTailTol = 1e-10;

/// Poisson tail weight sum_{k>=from} e^{-mean} mean^k / k!, summed forward
/// so small tails are not lost to cancellation.
double poisson_tail(double mean, int from);

/// Smallest dimension whose truncated coherent-state tail is below tol.
int min_dim_for_coherent(double beta_abs, double tol = kTailTol);

/// Default truncation dimension for a maximum coherent amplitude.
int default_dim(double beta_max);

/// Coherent state |beta>, renormalized to unit norm after truncation.
/// Throws TruncationError if the truncated tail weight exceeds tol.
Vector coherent_state(Complex beta, int dim, double tol = kTailTol);

/// Photon-number eigenstate |k>. Throws IndexError if k is outside the basis.
Vector fock_state(int k, int dim);

/// Annihilation operator: <n-1|a|n> = sqrt(n).
Matrix annihilation(int dim);

/// Diagonal operator g(a'a) with entries g(n), n = 0..dim-1.
Matrix number_function(const std::function<double(int)>& g, int dim);

/// Rotated quadrature (a' e^{i phi} + a e^{-i phi}) / sqrt(2).
Matrix quadrature_operator(double phi, int dim);

Matrix density_from_pure(const Vector& psi);
double trace_of(const Matrix& rho);
Complex expectation(const Matrix& op, const Matrix& rho);

/// Hermitian-symmetrizes and divides by the trace.
/// Throws DegenerateState if the trace is below 1e-14.
Matrix renormalized(const Matrix& rho);

}  // namespace cqtom::fock
