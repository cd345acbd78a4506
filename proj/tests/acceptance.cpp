// Acceptance suite: one line of output per criterion, nonzero exit if any
// fails. Stochastic criteria use fixed master-seed sets so the run is
// reproducible; runtime on one core is a few minutes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cqtom/calibration.hpp"
#include "cqtom/fock.hpp"
#include "cqtom/measurement.hpp"
#include "cqtom/tomography.hpp"
#include "cqtom/trajectory.hpp"

using namespace cqtom;
using fock::Complex;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", idx, what,
              detail.empty() ? "" : ": ", detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double max_abs(const fock::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

fock::Matrix random_density(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  fock::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex{g(rng), g(rng)};
  return fock::renormalized(fock::Matrix(m * m.adjoint()));
}

// --- 1. Kraus completeness --------------------------------------------------
void criterion1() {
  double worst = 0.0;
  for (double lt : {0.01, 0.04, 0.2})
    for (double phi : {0.0, 3 * kPi / 4, -3 * kPi / 4})
      for (int d : {8, 40, 64}) {
        const auto kp = meas::build_kraus({lt, phi, 0.0, d});
        const fock::Matrix r = kp.k00.adjoint() * kp.k00 +
                               kp.k10.adjoint() * kp.k10 -
                               fock::Matrix::Identity(d, d);
        worst = std::max(worst, max_abs(r));
      }
  report(1, "Kraus completeness", worst < 1e-12, fmt("max defect %.2e", worst));
}

// --- 2. unitary derivation oracle -------------------------------------------
void criterion2() {
  const meas::InteractionParams params{0.04, -3 * kPi / 4, 0.0, 16};
  const auto a = meas::build_kraus(params);
  const auto b = meas::kraus_from_unitaries(params);
  double worst = max_abs(fock::Matrix(a.k00.adjoint() * a.k00 -
                                      b.k00.adjoint() * b.k00));
  worst = std::max(worst, max_abs(fock::Matrix(a.k10.adjoint() * a.k10 -
                                               b.k10.adjoint() * b.k10)));
  for (unsigned s = 0; s < 20; ++s) {
    const auto rho = random_density(16, 100 + s);
    worst = std::max(worst, max_abs(fock::Matrix(
                                a.k00 * rho * a.k00.adjoint() -
                                b.k00 * rho * b.k00.adjoint())));
    worst = std::max(worst, max_abs(fock::Matrix(
                                a.k10 * rho * a.k10.adjoint() -
                                b.k10 * rho * b.k10.adjoint())));
  }
  report(2, "unitary-derivation oracle", worst < 1e-10,
         fmt("max deviation %.2e over 20 states", worst));
}

// --- 3. closed form vs matrix first-click probability ------------------------
void criterion3() {
  const double Phi = kPi / 4;
  const int dim = fock::default_dim(3.0);
  double worst = 0.0;
  for (double phi : {-3 * kPi / 4, Phi}) {
    const meas::InteractionParams params{0.04, phi, Phi, dim};
    const auto kp = meas::build_kraus(params);
    for (double b = 0.0; b <= 3.0 + 1e-12; b += 0.05) {
      const Complex beta = b * std::polar(1.0, Phi);
      const double closed =
          meas::first_click_probability(beta, params, meas::GammaMode::kSeries);
      const auto rho = fock::density_from_pure(fock::coherent_state(beta, dim));
      worst = std::max(
          worst, std::abs(closed - meas::detection_probabilities(rho, kp).second));
    }
  }
  // exact anchors: vacuum, and quadrature at right angles to the state
  const meas::InteractionParams params{0.04, Phi - kPi / 2, Phi, dim};
  const auto kp = meas::build_kraus(params);
  const auto vac = fock::density_from_pure(fock::fock_state(0, dim));
  const double a1 =
      std::abs(meas::detection_probabilities(vac, kp).second - 0.5);
  const auto rho =
      fock::density_from_pure(fock::coherent_state(3.0 * std::polar(1.0, Phi), dim));
  const double a2 =
      std::abs(meas::detection_probabilities(rho, kp).second - 0.5);
  report(3, "closed-form vs matrix click probability",
         worst < 2e-4 && a1 < 1e-10 && a2 < 1e-10,
         fmt("grid %.2e, anchors %.1e %.1e", worst, a1, a2));
}

// --- 4. exact enumeration vs Monte Carlo -------------------------------------
void criterion4() {
  bool ok = true;
  double worst_pmf = 0.0, worst_sig = 0.0;
  const int N = 100000;
  for (int which = 0; which < 2; ++which) {
    const int dim = which ? 16 : 8;
    const fock::Vector psi0 = which ? fock::coherent_state(Complex{1.0, 0.0}, dim)
                                    : fock::fock_state(0, dim);
    const meas::InteractionParams params{0.04, -3 * kPi / 4, 0.0, dim};
    const auto kp = meas::build_kraus(params);
    const meas::BandedKraus bk(params);
    const auto rho0 = fock::density_from_pure(psi0);
    const auto state = traj::InitialState::pure(psi0);
    for (int n : {1, 2, 5, 8}) {
      const auto pmf = meas::enumerate_integrated_probability(rho0, kp, n);
      double sum = 0.0;
      for (double p : pmf) sum += p;
      worst_pmf = std::max(worst_pmf, std::abs(sum - 1.0));
      traj::RunConfig rc{n, N, 77, false, 0};
      const auto ens = traj::run_ensemble(state, bk, rc);
      std::vector<int> counts(n + 1, 0);
      for (int m : ens.clicks) counts[m]++;
      for (int m = 0; m <= n; ++m) {
        const double se =
            std::sqrt(std::max(pmf[m] * (1 - pmf[m]) / N, 1e-12));
        const double sig = std::abs(double(counts[m]) / N - pmf[m]) / se;
        worst_sig = std::max(worst_sig, sig);
      }
    }
  }
  ok = worst_pmf < 1e-9 && worst_sig < 3.0;
  report(4, "enumeration vs Monte Carlo", ok,
         fmt("pmf defect %.1e, worst bin %.2f sigma", worst_pmf, worst_sig));
}

// --- 5. sigma anchors --------------------------------------------------------
void criterion5() {
  const double s300 = calib::sigma_of(300, calib::nu_of(0.04, 0.76, 1.0));
  const double ss300 = calib::sigma_s_of(s300);
  const double ss1000 =
      calib::sigma_s_of(calib::sigma_of(1000, calib::nu_of(0.04, 0.36, 1.0)));
  const bool ok = std::abs(s300 - 1.345) < 1e-3 &&
                  std::abs(ss300 - 0.845) < 1e-3 &&
                  std::abs(ss1000 - 0.176) < 1e-3;
  report(5, "sigma and sigma_s anchors", ok,
         fmt("sigma %.4f, sigma_s %.4f / %.4f", s300, ss300, ss1000));
}

// --- 6. Kolmogorov bound -----------------------------------------------------
void criterion6() {
  const double b = calib::kolmogorov_bound(0.95, 1000);
  const bool scaling =
      std::abs(calib::kolmogorov_bound(0.95, 4000) - b / 2) < 1e-15;
  report(6, "Kolmogorov bound", std::abs(b - 0.042947) < 1e-6 && scaling,
         fmt("bound %.6f", b));
}

// --- 7 and 8 share the 200-seed coherent reference loop ----------------------
void criteria7and8() {
  const int kSeeds = 200, n = 300, N = 1000;
  const double Phi = kPi / 4, phi = -3 * kPi / 4, lt = 0.04;
  const int dim = fock::default_dim(3.0);
  const auto state = traj::InitialState::pure(
      fock::coherent_state(3.0 * std::polar(1.0, Phi), dim));
  const meas::BandedKraus bk({lt, phi, Phi, dim});
  calib::CalibrationInput in;
  in.lambda_tau = lt;
  in.beta_max = 3.0;
  in.Phi = Phi;
  in.phi = phi;
  in.n = n;
  in.N = N;
  const double band = calib::kolmogorov_bound(0.95, N);

  int mu_ok = 0, cdf_ok = 0;
  double pooled_sum = 0, pooled_sq = 0, sigma_sum = 0;
  long pooled_count = 0;
  for (int s = 0; s < kSeeds; ++s) {
    traj::RunConfig rc{n, N, 1000 + std::uint64_t(s), false, 0};
    const auto ens = traj::run_ensemble(state, bk, rc);
    const auto fit = calib::fit_mu(ens.clicks, in);
    if (fit.accepted && fit.mu >= 0.61 && fit.mu <= 0.91) ++mu_ok;

    // check against the convolution CDF: the blurred coherent density is
    // normal with mean sqrt(2)|b|cos(Phi-phi), variance sigma
    const double mean = std::sqrt(2.0) * 3.0 * std::cos(Phi - phi);
    const double sd = std::sqrt(fit.sigma);
    const double d = tomo::ks_vs_continuous_cdf(
        ens.clicks, n, fit.nu, [&](double x) {
          return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
        });
    if (d < band) ++cdf_ok;
    for (int m : ens.clicks) {
      const double chi = tomo::chi_from_m(m, n, fit.nu);
      pooled_sum += chi;
      pooled_sq += chi * chi;
    }
    pooled_count += N;
    sigma_sum += fit.sigma;
  }
  const double mean = pooled_sum / pooled_count;
  const double var = pooled_sq / pooled_count - mean * mean;
  const double sigma_bar = sigma_sum / kSeeds;
  const double target = -std::sqrt(2.0) * 3.0;
  const double se = std::sqrt(var / pooled_count);
  const bool mean_ok = std::abs(mean - target) < 3 * se + 1e-12;
  const bool var_ok = std::abs(var - sigma_bar) < 0.1 * sigma_bar;
  report(7, "calibration mu recovery over 200 seeds",
         mu_ok >= kSeeds * 9 / 10, fmt("%d/%d accepted in [0.61,0.91]",
                                       mu_ok, kSeeds));
  report(8, "coherent chi CDF vs convolution over 200 seeds",
         cdf_ok >= kSeeds * 9 / 10 && mean_ok && var_ok,
         fmt("%d/%d in band, mean %.4f (target %.4f), var %.3f vs %.3f",
             cdf_ok, kSeeds, mean, target, var, sigma_bar));
}

// --- 9. Fock |1> deep probing ------------------------------------------------
void criterion9() {
  const int kSeeds = 200, n = 1000, N = 1000, dim = 4;
  const double lt = 0.04, phi = -3 * kPi / 4;
  const double nu = calib::nu_of(lt, 0.36, 1.0);
  const double sigma_s = calib::sigma_s_of(calib::sigma_of(n, nu));
  const auto state = traj::InitialState::pure(fock::fock_state(1, dim));
  const meas::BandedKraus bk({lt, phi, 0.0, dim});
  const double band = calib::kolmogorov_bound(0.95, N);

  const tomo::Grid grid = tomo::Grid::over(-8, 8, 0.01);
  const auto pdf = tomo::tabulate(grid, tomo::fock1_quadrature_pdf);
  const auto conv = tomo::convolve(pdf, sigma_s);
  const auto cdf = tomo::cdf_on_grid(conv);

  int in_band = 0;
  for (int s = 0; s < kSeeds; ++s) {
    traj::RunConfig rc{n, N, 5000 + std::uint64_t(s), false, 0};
    const auto ens = traj::run_ensemble(state, bk, rc);
    const double d = tomo::ks_vs_continuous_cdf(
        ens.clicks, n, nu,
        [&](double x) { return tomo::interp_cdf(grid, cdf, x); });
    if (d < band) ++in_band;
  }
  report(9, "single-photon CDF vs blurred model over 200 seeds",
         in_band >= kSeeds * 9 / 10, fmt("%d/%d in band", in_band, kSeeds));
}

// --- 10. gaussian closure ----------------------------------------------------
void criterion10() {
  const tomo::Grid grid = tomo::Grid::over(-12, 12, 0.02);
  const double Phi = kPi / 4, phi = -3 * kPi / 4, ss = 0.84512741046831974;
  const auto pdf = tomo::tabulate(grid, [&](double x) {
    return tomo::coherent_quadrature_pdf(x, 3.0, Phi, phi);
  });
  const auto conv = tomo::convolve(pdf, ss);
  const double mean = std::sqrt(2.0) * 3.0 * std::cos(Phi - phi);
  const double var = 0.5 + ss;
  double worst = 0.0;
  for (int i = 0; i < grid.size; ++i) {
    const double x = grid.x(i);
    const double expect =
        std::exp(-(x - mean) * (x - mean) / (2 * var)) /
        std::sqrt(2 * kPi * var);
    worst = std::max(worst, std::abs(conv.values[i] - expect));
  }
  report(10, "gaussian closure of the convolution", worst < 1e-6,
         fmt("sup deviation %.2e", worst));
}

// --- 11. bimodality threshold ------------------------------------------------
void criterion11() {
  const tomo::Grid grid = tomo::Grid::over(-8, 8, 0.02);
  const auto pdf = tomo::tabulate(grid, tomo::fock1_quadrature_pdf);
  auto center_ratio = [&](double ss) {
    const auto conv = tomo::convolve(pdf, ss);
    double peak = 0.0;
    for (double v : conv.values) peak = std::max(peak, v);
    return conv.values[(grid.size - 1) / 2] / peak;
  };
  const double shallow = center_ratio(0.84512741046831974);
  const double deep = center_ratio(0.1758217993079586);
  report(11, "single-photon dip vs instrument variance",
         shallow >= 0.95 && deep < 0.8,
         fmt("center/peak %.3f at 0.845, %.3f at 0.176", shallow, deep));
}

// --- 12. deconvolution round trip --------------------------------------------
void criterion12() {
  auto l2 = [](const tomo::DensityOnGrid& a, const tomo::DensityOnGrid& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      num += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
      den += b.values[i] * b.values[i];
    }
    return std::sqrt(num / den);
  };
  const tomo::Grid grid = tomo::Grid::over(-10, 10, 0.05);
  const auto gauss = tomo::tabulate(grid, [](double x) {
    return std::exp(-x * x) / std::sqrt(kPi);
  });
  const double e1 =
      l2(tomo::deconvolve(tomo::convolve(gauss, 0.84512741046831974),
                          0.84512741046831974, 1e-4),
         gauss);
  const auto f1 = tomo::tabulate(grid, tomo::fock1_quadrature_pdf);
  const double e2 =
      l2(tomo::deconvolve(tomo::convolve(f1, 0.1758217993079586),
                          0.1758217993079586, 1e-4),
         f1);
  report(12, "deconvolution round trip", e1 < 0.05 && e2 < 0.05,
         fmt("L2 error %.4f gaussian, %.4f single photon", e1, e2));
}

// --- 13. determinism of the command pipeline ---------------------------------
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion13() {
  const std::string cli = CQTOM_CLI_PATH;
  const std::string base = "acceptance_scratch";
  const std::string common = " calibrate --n 50 -N 200 --seed 99 --out ";
  bool ok = true;
  std::string detail = "byte-identical across threads and rerun";
  if (std::system((cli + common + base + "/t1 --threads 1 >/dev/null 2>&1").c_str()) != 0 ||
      std::system((cli + common + base + "/t3 --threads 3 >/dev/null 2>&1").c_str()) != 0 ||
      std::system((cli + " rerun " + base + "/t1/calibrate_manifest.json --out " +
                   base + "/rr >/dev/null 2>&1").c_str()) != 0) {
    ok = false;
    detail = "command failed";
  } else {
    for (const char* f : {"calibration.json", "calibration_cdf.csv"}) {
      const auto ref = slurp(base + "/t1/" + f);
      if (ref.empty() || ref != slurp(base + "/t3/" + f) ||
          ref != slurp(base + "/rr/" + f)) {
        ok = false;
        detail = std::string("mismatch in ") + f;
      }
    }
  }
  report(13, "determinism and manifest rerun", ok, detail);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criteria7and8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  criterion13();
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  std::printf("%d criterion(s) failed; %.1f s total\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
