#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cqtom/fock.hpp"

using namespace cqtom;
using fock::Complex;

TEST_SUITE("fock") {

TEST_CASE("poisson tail, forward summed") {
  // |beta|=3 truncated at D=40
  CHECK(fock::poisson_tail(9.0, 40) == doctest::Approx(2.859202e-14).epsilon(1e-5));
  CHECK(fock::poisson_tail(9.0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fock::poisson_tail(0.0, 1) == doctest::Approx(0.0));
}

TEST_CASE("truncation dimension rules") {
  const int d = fock::min_dim_for_coherent(3.0);
  CHECK(fock::poisson_tail(9.0, d) < fock::kTailTol);
  CHECK(fock::poisson_tail(9.0, d - 1) >= fock::kTailTol);
  CHECK(fock::default_dim(3.0) >= d);
  CHECK(fock::default_dim(3.0) >= 37);  // ceil(b^2 + 6b + 10)
}

TEST_CASE("coherent state amplitudes and norm") {
  const Complex beta = 3.0 * std::polar(1.0, std::numbers::pi / 4);
  const int dim = fock::default_dim(3.0);
  const auto psi = fock::coherent_state(beta, dim);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  // ratio of successive amplitudes is beta/sqrt(k)
  const Complex r = psi(5) / psi(4);
  CHECK(std::abs(r - beta / std::sqrt(5.0)) < 1e-12);
  // mean photon number |beta|^2 up to the truncated tail
  const auto num = fock::number_function([](int n) { return double(n); }, dim);
  const auto rho = fock::density_from_pure(psi);
  CHECK(fock::expectation(num, rho).real() == doctest::Approx(9.0).epsilon(1e-10));
}

TEST_CASE("coherent state rejects too-small dimension") {
  CHECK_THROWS_AS(fock::coherent_state(Complex{3.0, 0.0}, 10),
                  TruncationError);
}

TEST_CASE("fock basis and annihilation") {
  const auto k2 = fock::fock_state(2, 5);
  CHECK(k2(2) == Complex{1.0, 0.0});
  CHECK(k2.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(fock::fock_state(5, 5), IndexError);
  CHECK_THROWS_AS(fock::fock_state(-1, 5), IndexError);

  const auto a = fock::annihilation(5);
  CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(a(3, 4) - 2.0) < 1e-15);
  CHECK(a(2, 1) == Complex{0.0, 0.0});
  // a |beta> = beta |beta> away from the truncation edge
  const Complex beta{0.9, -0.4};
  const int db = fock::min_dim_for_coherent(1.0);
  const auto psi = fock::coherent_state(beta, db);
  const fock::Vector err = fock::annihilation(db) * psi - beta * psi;
  CHECK(err.head(err.size() - 1).norm() < 1e-9);
}

TEST_CASE("quadrature operator is hermitian with coherent mean") {
  const double phi = -3 * std::numbers::pi / 4;
  const auto x = fock::quadrature_operator(phi, 40);
  CHECK((x - x.adjoint()).norm() < 1e-14);
  const double Phi = std::numbers::pi / 4;
  const auto psi = fock::coherent_state(3.0 * std::polar(1.0, Phi), 40);
  const auto rho = fock::density_from_pure(psi);
  const double mean = fock::expectation(x, rho).real();
  CHECK(mean == doctest::Approx(std::sqrt(2.0) * 3.0 * std::cos(Phi - phi))
                    .epsilon(1e-9));
}

TEST_CASE("renormalized symmetrizes and fixes the trace") {
  fock::Matrix m = fock::Matrix::Zero(3, 3);
  m(0, 0) = 2.0;
  m(0, 1) = Complex{0.0, 0.5};  // slightly non-hermitian on purpose
  const auto rho = fock::renormalized(m);
  CHECK(fock::trace_of(rho) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((rho - fock::Matrix(rho.adjoint())).norm() < 1e-15);
  CHECK_THROWS_AS(fock::renormalized(fock::Matrix::Zero(3, 3)),
                  DegenerateState);
}

}  // TEST_SUITE
