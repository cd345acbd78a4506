#pragma once

#include <utility>
#include <vector>

#include "cqtom/fock.hpp"

// Conditional measurement operators for the probe-atom circuit: a resonant
// atom-field interaction of angle lambda*tau followed by a pi/4 rotation of
// the atomic basis at phase phi, with the atom detected in state 0 or 1.

namespace cqtom::meas {

struct InteractionParams {
  double lambda_tau;  // dimensionless coupling x time
  double phi;         // quadrature phase set by the basis-rotation pulse
  double Phi = 0.0;   // coherent-state phase, used only in closed-form formulas
  int dim;            // Fock-space truncation
};

// The pi/4 basis rotation (f * dt = pi/4) is structural: it is baked into the
// operator forms below and is not a free parameter.
struct KrausPair {
  fock::Matrix k00;  // atom detected in the lower state
  fock::Matrix k10;  // atom detected in the upper state (a "click")
  InteractionParams params;
};

/// K00 = (C - e^{-i phi} a S)/sqrt(2), K10 = (C + e^{-i phi} a S)/sqrt(2)
/// with C = cos(lt sqrt(a'a)) and S = sin(lt sqrt(a'a))/sqrt(a'a), S(0) = lt.
KrausPair build_kraus(const InteractionParams& params);

/// Same pair derived from the joint atom-field evolution U_a U_af, built
/// analytically on the 2x2 resonant excitation blocks and projected onto the
/// atomic in/out states. Serves as an independent oracle for build_kraus;
/// per-outcome global phases may differ, so compare POVMs and maps.
KrausPair kraus_from_unitaries(const InteractionParams& params);

/// A-priori probabilities (p0, p1) = Tr(K_i rho K_i').
std::pair<double, double> detection_probabilities(const fock::Matrix& rho,
                                                  const KrausPair& kp);

struct Reduction {
  fock::Matrix rho;    // normalized and symmetrized post-measurement state
  double probability;  // normalizer Tr(K rho K')
};

/// Conditional state update for the given outcome bit.
/// Throws ImpossibleOutcome if the normalizer is below 1e-14.
Reduction reduce(const fock::Matrix& rho, int outcome, const KrausPair& kp);

enum class GammaMode { kSeries, kApprox, kUnity };

/// Coherent-state-averaged Rabi overlap factor,
/// sum_m cos(lt sqrt(m)) sinc-ish(lt sqrt(m+1)) Poisson(m; |beta|^2).
double gamma_series(double beta_abs, double lambda_tau,
                    double tail_tol = fock::kTailTol);

/// Small-angle closed form 1 - (lt)^2 (2|beta|^2/3 + 1/6).
double gamma_approx(double beta_abs, double lambda_tau);

double gamma_factor(GammaMode mode, double beta_abs, double lambda_tau);

/// Closed-form click probability on the first probe for a coherent input:
/// (1 + 2 lt |beta| Gamma cos(Phi - phi)) / 2.
double first_click_probability(fock::Complex beta,
                               const InteractionParams& params, GammaMode mode);

/// Exact integrated click distribution P(n; m) by summing all 2^n outcome
/// sequences. Throws SizeError above the enumeration cap.
std::vector<double> enumerate_integrated_probability(const fock::Matrix& rho0,
                                                     const KrausPair& kp, int n,
                                                     int cap = 14);

/// O(dim) applier for the two Kraus branches; the operators are a diagonal
/// plus one superdiagonal. Used by the trajectory engine's pure-state path.
class BandedKraus {
 public:
  explicit BandedKraus(const InteractionParams& params);

  /// out = K_outcome * in (unnormalized).
  void apply(int outcome, const fock::Vector& in, fock::Vector& out) const;
  int dim() const { return static_cast<int>(cos_diag_.size()); }
  const InteractionParams& params() const { return params_; }

 private:
  std::vector<double> cos_diag_;   // cos(lt sqrt(n))
  std::vector<double> sin_super_;  // sin(lt sqrt(n+1)), entry (n, n+1) of a*S
  fock::Complex phase_;            // e^{-i phi}
  InteractionParams params_;
};

}  // namespace cqtom::meas
