#pragma once

#include <span>
#include <string>
#include <vector>

#include "casimir/mirror_models.hpp"

namespace casimir {

struct CavityConfig {
  double L = 1.0;
  DielectricModel model = PerfectMirror{};
};

/// Throws invalid-argument for L <= 0 or invalid model parameters.
void validate(const CavityConfig& cfg);

/// Values of the dispersion function and its derivatives at one frequency.
struct SpectralPoint {
  cplx X;          // r^2 exp(-2 kappa L)
  cplx D;          // 1 - X
  cplx lnD;        // log(1 - X), principal branch
  cplx dlnD_domega;
  cplx dlnD_dL;    // renormalized: 2 kappa X / (1 - X)
  cplx dlnD_dgamma;
  cplx kappa;
};

/// Dispersion function of one (p, k) channel at fixed temperature. The branch
/// structure is computed once; evaluations are const and thread-safe.
class Channel {
 public:
  Channel(const CavityConfig& cfg, const TransverseMode& mode, double tau,
          bool continuation = true);

  SpectralPoint at(cplx omega, const Sheet& sheet = {},
                   bool derivatives = true) const;

  /// g on the imaginary axis, xi >= 0; xi = 0 uses the zero-frequency limit.
  double g_imag(double xi) const;
  /// dg(i xi)/dxi for xi > 0, closed form.
  double dg_imag(double xi) const;
  /// dg(i xi)/dgamma for xi > 0 (zero for models without damping).
  double dg_dgamma_imag(double xi) const;
  /// Renormalized L-derivative of g(i xi); xi = 0 uses the zero limit.
  double dg_dL_imag(double xi) const;

  const ChannelOptics& optics() const { return optics_; }
  double L() const { return L_; }
  double k() const { return optics_.mode().k; }
  std::vector<cplx> branch_points() const { return optics_.branch_points(); }

 private:
  ChannelOptics optics_;
  double L_;
};

/// g = ln(1 - r^2 e^{-2 kappa L}). Throws singular-spectral-point on a
/// cavity resonance.
cplx g_value(const CavityConfig& cfg, const TransverseMode& mode, cplx omega,
             double tau = 0.0);

struct ZeroDerivatives {
  double g_xi = 0.0;
  double g_xi2 = 0.0;
  double error_xi = 0.0;
  double error_xi2 = 0.0;
};

/// One-sided derivatives of g(i xi) at xi = 0+: the closed-form slope and
/// its forward differences, Richardson-extrapolated over halving steps.
/// Throws derivative-estimate-failed.
ZeroDerivatives g_derivatives_at_zero(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      double abs_tol = 1e-8);

/// D(w) = 1 - r^2 e^{-2 kappa L}.
cplx dispersion(const CavityConfig& cfg, const TransverseMode& mode,
                cplx omega, double tau = 0.0);

/// Closed-form d ln D / d w. Throws on-pole at a zero of D.
cplx dlnD_domega(const CavityConfig& cfg, const TransverseMode& mode,
                 cplx omega, double tau = 0.0);

/// kappa (1 + X) / (1 - X), X = r^2 e^{-2 kappa L}. This equals the
/// renormalized derivative 2 kappa X / (1 - X) plus kappa; the force kernel
/// uses the renormalized form. Throws on-pole at a zero of D.
cplx dlnD_dL(const CavityConfig& cfg, const TransverseMode& mode, cplx omega,
             double tau = 0.0);

struct GTildeOptions {
  cplx alpha{0.0, 1.0};
  double tau0 = 0.05;
  int points = 8;
};

/// lim_{tau -> 0} g(alpha tau, tau). For DrudeThermal with gamma0 = 0 this is
/// an extrapolation over tau0 2^{-j} and throws limit-not-attained; every
/// other model is continuous at the origin and gives g(0).
double g_tilde_zero(const CavityConfig& cfg, const TransverseMode& mode,
                    const GTildeOptions& opts = {});

struct SpectralCurve {
  TransverseMode mode;
  std::vector<double> xi;
  std::vector<double> g;
};

SpectralCurve sample_g_curve(const CavityConfig& cfg, const TransverseMode& mode,
                             double tau, std::span<const double> xi);

/// CSV with header `xi,g_te,g_tm`; both curves must share the grid.
std::string spectral_curves_csv(const SpectralCurve& te, const SpectralCurve& tm);

}  // namespace casimir
