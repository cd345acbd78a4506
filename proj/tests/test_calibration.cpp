#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cqtom/calibration.hpp"
#include "cqtom/trajectory.hpp"

using namespace cqtom;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<int> simulated_clicks(double mu_true, int n, int N,
                                  std::uint64_t seed) {
  // binomial draws at the model p_bar, detuned quadrature (cos = -1)
  const double g = 1.0;
  const double p = calib::p_bar(3.0, kPi / 4, -3 * kPi / 4, 0.04, mu_true, g);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<int> bin(n, p);
  std::vector<int> out(N);
  for (auto& m : out) m = bin(rng);
  return out;
}
}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("nu and p_bar anchor values") {
  CHECK(calib::nu_of(0.04, 0.76, 1.0) ==
        doctest::Approx(0.049780317395532944).epsilon(1e-14));
  CHECK(calib::nu_of(0.04, 0.36, 1.0) ==
        doctest::Approx(0.038466608896548182).epsilon(1e-14));
  CHECK_THROWS_AS(calib::nu_of(0.04, -1.0, 1.0), NonpositiveNu);
  CHECK_THROWS_AS(calib::nu_of(0.04, 0.5, 0.0), NonpositiveNu);

  CHECK(calib::p_bar(3.0, kPi / 4, -3 * kPi / 4, 0.04, 0.76, 1.0) ==
        doctest::Approx(0.3944).epsilon(1e-14));
  CHECK_THROWS_AS(calib::p_bar(40.0, 0.0, 0.0, 0.04, 0.76, 1.0), OutOfRange);
}

TEST_CASE("binomial pmf and cdf") {
  const auto pmf = calib::binomial_pmf(4, 0.25);
  CHECK(pmf.size() == 5);
  CHECK(pmf[0] == doctest::Approx(std::pow(0.75, 4)).epsilon(1e-13));
  CHECK(pmf[4] == doctest::Approx(std::pow(0.25, 4)).epsilon(1e-13));
  double s = 0;
  for (double p : pmf) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  // large n still sums to one thanks to the log-space terms
  const auto big = calib::binomial_pmf(1000, 0.3944);
  s = 0;
  for (double p : big) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(calib::theoretical_cdf_m(4, 0.25, -0.5) == 0.0);
  CHECK(calib::theoretical_cdf_m(4, 0.25, 4.0) == doctest::Approx(1.0));
  CHECK(calib::theoretical_cdf_m(4, 0.25, 1.5) ==
        doctest::Approx(pmf[0] + pmf[1]).epsilon(1e-13));
}

TEST_CASE("moivre-laplace density") {
  const double v = calib::gaussian_pdf_m(300, 0.3944, 300 * 0.3944);
  CHECK(v == doctest::Approx(1.0 / std::sqrt(2 * kPi * 300 * 0.3944 * 0.6056))
                 .epsilon(1e-13));
}

TEST_CASE("empirical cdf") {
  const std::vector<double> s = {1.0, 2.0, 2.0, 5.0};
  CHECK(calib::empirical_cdf(s, 0.0) == 0.0);
  CHECK(calib::empirical_cdf(s, 2.0) == doctest::Approx(0.75));
  CHECK(calib::empirical_cdf(s, 9.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(calib::empirical_cdf(std::vector<double>{}, 0.0),
                  EmptySample);
}

TEST_CASE("kolmogorov bound") {
  CHECK(calib::kolmogorov_bound(0.95, 1000) ==
        doctest::Approx(0.042946940834673757).epsilon(1e-14));
  CHECK(calib::kolmogorov_bound(0.95, 250) ==
        doctest::Approx(2 * 0.042946940834673757).epsilon(1e-14));
}

TEST_CASE("discrete KS statistic on a hand example") {
  // two samples {0, 2} against pmf {1/4, 1/2, 1/4} on m = 0..2:
  // F_emp = {1/2, 1/2, 1}, F = {1/4, 3/4, 1} -> sup = 1/4
  const std::vector<int> samples = {0, 2};
  const std::vector<double> pmf = {0.25, 0.5, 0.25};
  CHECK(calib::ks_statistic_discrete(samples, 2, pmf) ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("sorted-sample KS checks both one-sided limits") {
  // single sample at the median of U(0,1): both gaps are 1/2
  const std::vector<double> s = {0.5};
  const double d = calib::ks_statistic_sorted(
      s, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(d == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("variance bookkeeping") {
  const double nu76 = calib::nu_of(0.04, 0.76, 1.0);
  CHECK(calib::sigma_of(300, nu76) ==
        doctest::Approx(1.3451274104683197).epsilon(1e-13));
  CHECK(calib::sigma_s_of(calib::sigma_of(300, nu76)) ==
        doctest::Approx(0.84512741046831974).epsilon(1e-13));
  const double nu36 = calib::nu_of(0.04, 0.36, 1.0);
  CHECK(calib::sigma_s_of(calib::sigma_of(1000, nu36)) ==
        doctest::Approx(0.1758217993079586).epsilon(1e-12));
  CHECK_THROWS_AS(calib::sigma_s_of(0.4), NonpositiveInstrumentVariance);
}

TEST_CASE("mu fit recovers a known detection efficiency") {
  calib::CalibrationInput in;
  in.lambda_tau = 0.04;
  in.beta_max = 3.0;
  in.Phi = kPi / 4;
  in.phi = -3 * kPi / 4;
  in.n = 300;
  in.N = 1000;
  const auto samples = simulated_clicks(0.76, in.n, in.N, 2024);
  const auto r = calib::fit_mu(samples, in);
  CHECK(r.accepted);
  CHECK(std::abs(r.mu - 0.76) <= 0.03);
  CHECK(r.nu == doctest::Approx(calib::nu_of(0.04, r.mu, 1.0)).epsilon(1e-14));
  CHECK(r.sigma == doctest::Approx(calib::sigma_of(in.n, r.nu)).epsilon(1e-14));
  CHECK(r.ks_statistic < r.ks_bound);

  // order of the samples must not matter
  auto shuffled = samples;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(5));
  const auto r2 = calib::fit_mu(shuffled, in);
  CHECK(r2.mu == r.mu);
  CHECK(r2.ks_statistic == r.ks_statistic);
}

TEST_CASE("mu fit flags hopeless samples instead of throwing") {
  calib::CalibrationInput in;
  in.lambda_tau = 0.04;
  in.beta_max = 3.0;
  in.Phi = kPi / 4;
  in.phi = -3 * kPi / 4;
  in.n = 300;
  in.N = 400;
  std::vector<int> junk(in.N, 299);  // m ~ n: far outside the model's reach
  const auto r = calib::fit_mu(junk, in);
  CHECK_FALSE(r.accepted);
  CHECK(r.ks_statistic > r.ks_bound);
}

TEST_CASE("sigma_s decreases along the n sweep") {
  calib::CalibrationInput base;
  base.lambda_tau = 0.04;
  base.beta_max = 3.0;
  base.Phi = kPi / 4;
  base.phi = -3 * kPi / 4;
  base.N = 300;
  const std::vector<int> ns = {100, 400};
  const auto rows = calib::sigma_s_vs_n_sweep(base, ns, 31, 0, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 100);
  CHECK(rows[0].instrument_ok);
  CHECK(rows[1].instrument_ok);
  CHECK(rows[1].sigma_s < rows[0].sigma_s);
}

}  // TEST_SUITE
