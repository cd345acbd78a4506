#pragma once

#include <span>
#include <vector>

#include "cqtom/calibration.hpp"

// Quadrature layer: the chi mapping, analytic quadrature densities, the
// Gaussian instrumental function, convolution on a uniform grid, sample CDFs
// of chi, and regularized deconvolution (the final protocol step).

namespace cqtom::tomo {

struct Grid {
  double lo = -6.0;
  double h = 0.05;
  int size = 241;

  double x(int i) const { return lo + i * h; }
  double hi() const { return x(size - 1); }
  static Grid over(double lo, double hi, double h);
};

struct DensityOnGrid {
  Grid grid;
  std::vector<double> values;
};

/// chi = (2m - n) / (n nu). Throws NonpositiveNu; IndexError if m outside 0..n.
double chi_from_m(int m, int n, double nu);

/// Normal density with mean sqrt(2)|beta|cos(Phi-phi), variance 1/2.
double coherent_quadrature_pdf(double chi, double beta_abs, double Phi,
                               double phi);

/// Single-photon density (2 chi^2 / sqrt(pi)) e^{-chi^2}; phase independent.
double fock1_quadrature_pdf(double chi);

/// General |k> quadrature density via the Hermite recurrence.
double fock_quadrature_pdf(int k, double chi);

/// Zero-mean normal of variance sigma_s. Throws NonpositiveInstrumentVariance.
double instrumental_pdf(double chi, double sigma_s);

/// Tabulates f on the grid (no normalization).
DensityOnGrid tabulate(const Grid& grid,
                       const std::function<double(double)>& f);

double integral_of(const DensityOnGrid& d);  // trapezoid

/// Numerical convolution with the Gaussian kernel of variance sigma_s.
/// Throws GridTooNarrow unless the grid covers the pdf's bulk
/// (mean +- 3 sigma_pdf) extended by 3 sqrt(sigma_s) on both sides.
DensityOnGrid convolve(const DensityOnGrid& pdf, double sigma_s);

/// Cumulative trapezoid integral on the grid; monotone, ends near 1 for a
/// normalized density.
std::vector<double> cdf_on_grid(const DensityOnGrid& pdf);

/// Linear interpolation of a grid-sampled CDF, clamped to [0, 1].
double interp_cdf(const Grid& grid, std::span<const double> cdf, double x);

struct Tomogram {
  std::vector<double> chi;  // per-trajectory quadrature samples, by index
  double nu;
  int n;
  double phi;
};

Tomogram tomogram_from_ensemble(std::span<const int> m_samples, int n,
                                double nu, double phi);

/// Sup distance between the empirical CDF of the click counts and a
/// continuous model CDF discretized onto the chi lattice (cell right edges,
/// i.e. chi_m + 1/(n nu)); the honest comparison for lattice-valued data.
double ks_vs_continuous_cdf(std::span<const int> m_samples, int n, double nu,
                            const std::function<double(double)>& cdf);

/// Sample density for deconvolution: histogram on the grid followed by one
/// Gaussian kernel-density pass of bandwidth h, normalized.
DensityOnGrid histogram_density(std::span<const double> samples,
                                const Grid& grid);

struct DeconvDiagnostics {
  bool ill_conditioned = false;  // sigma_s * k_max^2 > 40
};

/// Regularized frequency-domain deconvolution: divide by the Gaussian kernel
/// transform with Tikhonov damping epsilon, clip negative lobes, renormalize.
DensityOnGrid deconvolve(const DensityOnGrid& hist, double sigma_s,
                         double epsilon, DeconvDiagnostics* diag = nullptr);

}  // namespace cqtom::tomo
