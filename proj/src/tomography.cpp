#include "cqtom/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace cqtom::tomo {

namespace {

double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) /
         std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

Grid Grid::over(double lo, double hi, double h) {
  Grid g;
  g.lo = lo;
  g.h = h;
  g.size = static_cast<int>(std::round((hi - lo) / h)) + 1;
  return g;
}

double chi_from_m(int m, int n, double nu) {
  if (nu <= 0.0) throw NonpositiveNu("chi_from_m: nu must be positive");
  if (m < 0 || m > n) throw IndexError("chi_from_m: m outside 0..n");
  return (2.0 * m - n) / (n * nu);
}

double coherent_quadrature_pdf(double chi, double beta_abs, double Phi,
                               double phi) {
  const double mean = std::numbers::sqrt2 * beta_abs * std::cos(Phi - phi);
  return normal_pdf(chi, mean, 0.5);
}

double fock1_quadrature_pdf(double chi) {
  return 2.0 * chi * chi / std::sqrt(std::numbers::pi) *
         std::exp(-chi * chi);
}

double fock_quadrature_pdf(int k, double chi) {
  // physicists' Hermite recurrence; density e^{-x^2} H_k(x)^2 / (2^k k! sqrt(pi))
  double hm1 = 0.0, h = 1.0;
  for (int j = 0; j < k; ++j) {
    const double next = 2.0 * chi * h - 2.0 * j * hm1;
    hm1 = h;
    h = next;
  }
  double log_norm = 0.0;
  for (int j = 1; j <= k; ++j) log_norm += std::log(2.0 * j);
  return h * h * std::exp(-chi * chi - log_norm) / std::sqrt(std::numbers::pi);
}

double instrumental_pdf(double chi, double sigma_s) {
  if (sigma_s <= 0.0)
    throw NonpositiveInstrumentVariance("instrumental_pdf: sigma_s <= 0");
  return normal_pdf(chi, 0.0, sigma_s);
}

DensityOnGrid tabulate(const Grid& grid,
                       const std::function<double(double)>& f) {
  DensityOnGrid d{grid, std::vector<double>(grid.size)};
  for (int i = 0; i < grid.size; ++i) d.values[i] = f(grid.x(i));
  return d;
}

double integral_of(const DensityOnGrid& d) {
  double s = 0.0;
  for (int i = 0; i + 1 < d.grid.size; ++i)
    s += 0.5 * (d.values[i] + d.values[i + 1]);
  return s * d.grid.h;
}

DensityOnGrid convolve(const DensityOnGrid& pdf, double sigma_s) {
  if (sigma_s <= 0.0)
    throw NonpositiveInstrumentVariance("convolve: sigma_s <= 0");
  const Grid& g = pdf.grid;
  // coverage check on the pdf's bulk: mean +- 3 sd, extended by the kernel
  double mass = 0.0, mean = 0.0, m2 = 0.0;
  for (int i = 0; i < g.size; ++i) {
    mass += pdf.values[i];
    mean += pdf.values[i] * g.x(i);
  }
  mean /= mass;
  for (int i = 0; i < g.size; ++i) {
    const double d = g.x(i) - mean;
    m2 += pdf.values[i] * d * d;
  }
  const double sd = std::sqrt(m2 / mass);
  const double reach = 3.0 * sd + 3.0 * std::sqrt(sigma_s);
  if (mean - reach < g.lo || mean + reach > g.hi())
    throw GridTooNarrow("convolve: grid does not cover the blurred support");

  DensityOnGrid out{g, std::vector<double>(g.size, 0.0)};
  std::vector<double> kernel(2 * g.size - 1);
  for (int k = 0; k < 2 * g.size - 1; ++k)
    kernel[k] = normal_pdf((k - (g.size - 1)) * g.h, 0.0, sigma_s);
  for (int i = 0; i < g.size; ++i) {
    double s = 0.0;
    for (int j = 0; j < g.size; ++j)
      s += kernel[i - j + g.size - 1] * pdf.values[j];
    out.values[i] = s * g.h;
  }
  return out;
}

std::vector<double> cdf_on_grid(const DensityOnGrid& pdf) {
  std::vector<double> cdf(pdf.grid.size, 0.0);
  for (int i = 1; i < pdf.grid.size; ++i)
    cdf[i] = cdf[i - 1] +
             0.5 * (pdf.values[i - 1] + pdf.values[i]) * pdf.grid.h;
  return cdf;
}

double interp_cdf(const Grid& grid, std::span<const double> cdf, double x) {
  if (x <= grid.lo) return 0.0;
  if (x >= grid.hi()) return 1.0;
  const double t = (x - grid.lo) / grid.h;
  const int i = static_cast<int>(t);
  const double frac = t - i;
  const double v = cdf[i] + frac * (cdf[i + 1] - cdf[i]);
  return std::clamp(v, 0.0, 1.0);
}

Tomogram tomogram_from_ensemble(std::span<const int> m_samples, int n,
                                double nu, double phi) {
  Tomogram t;
  t.nu = nu;
  t.n = n;
  t.phi = phi;
  t.chi.reserve(m_samples.size());
  for (int m : m_samples) t.chi.push_back(chi_from_m(m, n, nu));
  return t;
}

double ks_vs_continuous_cdf(std::span<const int> m_samples, int n, double nu,
                            const std::function<double(double)>& cdf) {
  if (m_samples.empty()) throw EmptySample("ks_vs_continuous_cdf: no samples");
  std::vector<int> counts(n + 1, 0);
  for (int m : m_samples) counts[std::clamp(m, 0, n)]++;
  const double half = 1.0 / (n * nu);  // half a lattice step in chi
  const double inv = 1.0 / m_samples.size();
  double femp = 0.0, sup = 0.0;
  for (int m = 0; m <= n; ++m) {
    femp += counts[m] * inv;
    const double ftheo = cdf(chi_from_m(m, n, nu) + half);
    sup = std::max(sup, std::abs(femp - ftheo));
  }
  return sup;
}

DensityOnGrid histogram_density(std::span<const double> samples,
                                const Grid& grid) {
  if (samples.empty()) throw EmptySample("histogram_density: no samples");
  DensityOnGrid hist{grid, std::vector<double>(grid.size, 0.0)};
  for (double s : samples) {
    const int i = static_cast<int>(std::round((s - grid.lo) / grid.h));
    if (i >= 0 && i < grid.size) hist.values[i] += 1.0;
  }
  // one kernel-density pass of bandwidth h
  DensityOnGrid smooth{grid, std::vector<double>(grid.size, 0.0)};
  const int reach = 6;
  for (int i = 0; i < grid.size; ++i) {
    if (hist.values[i] == 0.0) continue;
    for (int j = std::max(0, i - reach);
         j <= std::min(grid.size - 1, i + reach); ++j)
      smooth.values[j] +=
          hist.values[i] * normal_pdf((j - i) * grid.h, 0.0, grid.h * grid.h);
  }
  const double z = integral_of(smooth);
  for (double& v : smooth.values) v /= z;
  return smooth;
}

DensityOnGrid deconvolve(const DensityOnGrid& hist, double sigma_s,
                         double epsilon, DeconvDiagnostics* diag) {
  if (sigma_s <= 0.0)
    throw NonpositiveInstrumentVariance("deconvolve: sigma_s <= 0");
  const Grid& g = hist.grid;
  const int M = g.size;
  const double k_max = std::numbers::pi / g.h;
  if (diag) diag->ill_conditioned = sigma_s * k_max * k_max > 40.0;

  using Cplx = std::complex<double>;
  // naive DFT; grids here are a few hundred points
  std::vector<Cplx> spec(M);
  for (int j = 0; j < M; ++j) {
    Cplx s = 0.0;
    for (int m = 0; m < M; ++m) {
      const double ang = -2.0 * std::numbers::pi * j * m / M;
      s += hist.values[m] * Cplx{std::cos(ang), std::sin(ang)};
    }
    const int signed_j = j <= M / 2 ? j : j - M;
    const double k = 2.0 * std::numbers::pi * signed_j / (M * g.h);
    const double gk = std::exp(-0.5 * sigma_s * k * k);
    spec[j] = s * gk / (gk * gk + epsilon);
  }
  DensityOnGrid out{g, std::vector<double>(M)};
  for (int m = 0; m < M; ++m) {
    Cplx s = 0.0;
    for (int j = 0; j < M; ++j) {
      const double ang = 2.0 * std::numbers::pi * j * m / M;
      s += spec[j] * Cplx{std::cos(ang), std::sin(ang)};
    }
    out.values[m] = std::max(0.0, s.real() / M);
  }
  const double z = integral_of(out);
  if (z <= 0.0) throw DegenerateState("deconvolve: estimate vanished");
  for (double& v : out.values) v /= z;
  return out;
}

}  // namespace cqtom::tomo
