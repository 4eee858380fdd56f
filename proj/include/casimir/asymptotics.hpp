#pragma once

#include <string>
#include <vector>

#include "casimir/lifshitz.hpp"

// Low-temperature entropy. With H(xi) = sum_p int k dk/(2 pi) g_p(k, i xi),
// the Matsubara entropy per area is S = -sum'_n [H + xi H'](n tau), and the
// Euler-Maclaurin formula gives S = H'(0) tau / 6 - H'''(0) tau^3 / 180 + ...
// for analytic H.

namespace casimir {

struct EntropyExpansion {
  double c1 = 0.0;
  /// Identically zero: the tau^2 terms of the series cancel.
  double c2 = 0.0;
  double c1_te = 0.0;
  double c1_tm = 0.0;
  double c2_te = 0.0;
  double c2_tm = 0.0;
  double error_te = 0.0;
  double error_tm = 0.0;
  /// tau below which c1 tau is expected to dominate.
  double radius = 0.0;
};

/// H_p'(xi) for xi > 0: int k dk/(2 pi) dg_p(k, i xi)/dxi.
Estimate<double> polarization_slope(const CavityConfig& cfg, Polarization p,
                                    double xi, Tolerance tol = {1e-10, 1e-300});

/// c1 = H'(0)/6 per polarization. The k-integral is taken before xi -> 0:
/// for damped metals the TE slope concentrates at k ~ sqrt(xi omega_p^2/gamma)
/// and vanishes pointwise in k. Requires temperature-independent r.
/// Throws derivative-estimate-failed.
EntropyExpansion entropy_expansion(const CavityConfig& cfg);

struct EulerMaclaurinResult {
  double value = 0.0;
  /// Magnitude of the highest-order significant group in tau, or the
  /// propagated derivative uncertainty if larger.
  double truncation = 0.0;
  /// Contribution of each summed power tau^q.
  std::vector<double> groups;
  double xi_fit = 0.0;
};

/// Entropy from the double series over k = 2..k_max, m = 0..m_max. Only
/// powers tau^q whose terms are all inside the box are summed, up to q = 5;
/// they need H^{(j)}(0), j <= 6, taken from a Chebyshev fit of H' on
/// [0, xi_fit]. Throws series-outside-radius when a significant group
/// exceeds the previous one.
EulerMaclaurinResult euler_maclaurin_entropy(const CavityConfig& cfg,
                                             double tau, int k_max, int m_max,
                                             double xi_fit = 0.0);

/// Coefficient of the (k, m) term.
double euler_maclaurin_coefficient(int k, int m);

enum class NernstClass { vanishes, finite_negative, finite_positive };

std::string to_string(NernstClass c);

struct NernstVerdict {
  std::string model;
  double residual = 0.0;
  NernstClass classification = NernstClass::vanishes;
  bool discontinuity = false;
};

inline constexpr double kNernstTolerance = 1e-6;

/// S(tau -> 0) per area. Nonzero only for damping with gamma(tau)/tau -> 0
/// and gamma(0) = 0, where it is (1/2) int k dk/(2 pi) g~_TE(k, 0).
NernstVerdict residual_entropy(const CavityConfig& cfg,
                               Tolerance tol = {1e-10, 1e-300});

/// Header `model,residual,classification,discontinuity` and one row.
std::string nernst_csv(const NernstVerdict& v);

}  // namespace casimir
