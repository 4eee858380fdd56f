#pragma once

#include <functional>
#include <vector>

#include "casimir/spectral.hpp"

// Per-area quantities use the continuum measure sum_k -> A d^2k / (2 pi)^2:
//
//   F / A = 1/(4 pi^2) sum_p int k dk  tau sum'_n g(i n tau)
//   E / A = 1/(4 pi^2) sum_p int k dk  int_0^inf dxi g(i xi)
//
// which gives -pi^2 / (720 L^3) for ideal mirrors at T = 0.

namespace casimir {

struct LifshitzOptions {
  /// Relative tolerance of each transverse-wavenumber integral.
  double k_rel_tol = 1e-12;
  /// Stop the Matsubara sum once the tail is below this fraction of the sum.
  double sum_rel_tol = 1e-12;
  double abs_tol = 1e-300;
  long n_max = 2'000'000;
};

struct SeriesResult {
  double value = 0.0;
  /// Quadrature error plus tail bound.
  double error = 0.0;
  long terms = 0;
  double tail = 0.0;
};

/// int_0^inf k dk f(k), substituting u = sqrt(k^2 + xi^2) so that the
/// integrand decays like exp(-2 u L) without a kink at k = 0. `k_breaks`
/// lists transverse wavenumbers where f changes scale.
Estimate<double> k_integral(const std::function<double(double)>& f, double xi,
                            double L, Tolerance tol,
                            std::span<const double> k_breaks = {});

SeriesResult free_energy(const CavityConfig& cfg, double tau,
                         const LifshitzOptions& opts = {});

/// S / A = -(1/(2 pi)) sum_p int k dk sum'_n [g + n tau g_xi + tau g_tau].
SeriesResult entropy_matsubara(const CavityConfig& cfg, double tau,
                               const LifshitzOptions& opts = {});

/// -dF/dL per area, with the renormalized kernel 2 kappa X / (1 - X).
SeriesResult force(const CavityConfig& cfg, double tau,
                   const LifshitzOptions& opts = {});

Estimate<double> energy_integral_T0(const CavityConfig& cfg,
                                    const LifshitzOptions& opts = {});
Estimate<double> force_integral_T0(const CavityConfig& cfg,
                                   const LifshitzOptions& opts = {});

struct ZeroTemperatureLimit {
  double value = 0.0;
  double residual = 0.0;
  int order = 0;
  std::vector<double> taus;
  std::vector<double> values;
};

/// Richardson extrapolation of f over tau0 2^{-j}, j = 0 .. count-1.
ZeroTemperatureLimit zero_temperature_limit(
    const std::function<double(double)>& f, double tau0, int count);

// Single-channel quantities in mode-sum normalization, i.e. twice the
// channel's share (1/2) sum omega of the energy:
//
//   channel_energy_T0        (1/pi) int_0^inf g(i xi) dxi
//   channel_free_energy      (tau/pi) sum'_n g(i n tau)
//   channel_matsubara_energy -(tau^2/pi) sum_{n>=1} n g_xi(n tau)
//
// The last is the finite-temperature mode sum of the pole representation
// (the internal energy of the channel for temperature-independent r).

double channel_energy_T0(const CavityConfig& cfg, const TransverseMode& mode,
                         Tolerance tol = {1e-12, 1e-300});
SeriesResult channel_free_energy(const CavityConfig& cfg,
                                 const TransverseMode& mode, double tau,
                                 double rel_tol = 1e-14);
SeriesResult channel_matsubara_energy(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      double rel_tol = 1e-14);

}  // namespace casimir
