#pragma once

#include <functional>
#include <string>
#include <vector>

#include "casimir/spectral.hpp"

// Complex cavity modes: zeros of D continued into the lower half plane, and
// per-channel energies written as sums over them.
//
// The per-channel energy Omega is the mode-sum normalization of lifshitz.hpp,
// Omega = (1/pi) int_0^inf g(i xi) dxi at T = 0. For any region G to the
// right of the imaginary axis, the residue theorem applied to
// K(z) d ln D / dz on dG gives
//
//   Omega = Re sum_{zeros in G} K(w_m) - Re sum_{poles in G} m K(p)
//           - Re (1/(2 pi i)) int_{dG minus [iY, 0]} K d ln D
//
// with K(z) = z - (2iz/pi) ln(z/Lambda): the piece of dG on the imaginary axis
// reproduces Omega exactly (up to the exponentially small tail beyond iY).
// The boundary integral is the operational meaning of the renormalized sum.
// At finite temperature K is replaced by
//
//   K_T(z) = z coth(pi z/tau) - (iz/pi) [psi(1 + iz/tau) + psi(1 - iz/tau)
//                                        + 2 ln(tau/Lambda)],
//
// which tends to K as tau -> 0, has Re K_T(w) = w (2 n_T(w) + 1) for real w,
// and whose poles at i n tau turn the imaginary-axis piece into the
// Matsubara internal energy -(tau^2/pi) sum_n n g_xi(n tau).

namespace casimir {

struct Rect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
           z.imag() <= im_max;
  }
};

struct ModeSet {
  TransverseMode mode;
  /// Zeros of D with Re >= 0, sorted by Re; -conj(w) is implied.
  std::vector<cplx> zeros;
  std::vector<int> multiplicity;
  /// |D| at each polished zero.
  std::vector<double> residual;
  /// Poles of D (poles of r_TM squared), each of order pole_order.
  std::vector<cplx> poles;
  std::vector<int> pole_order;
  Rect region;
  /// Zeros minus pole orders inside the region by the argument principle,
  /// before truncation to max_count.
  int winding = 0;
  /// Zeros (with multiplicity) inside the region.
  int zero_count = 0;
};

struct ModeSearchOptions {
  double tau = 0.0;
  /// Newton stops at |D| < polish_tol * (1 + |X|).
  double polish_tol = 1e-12;
  /// Zeros closer than dedup * |w| are merged.
  double dedup = 1e-8;
  int max_depth = 48;
  /// Height above the real axis used when the region touches it.
  double eta = 0.05;
};

/// Zeros of D in the region by recursive argument-principle bisection and
/// Newton polishing. A region touching the real axis is extended to
/// Im = eta so that real zeros lie inside. Cells are split at branch points
/// so that each is analytic on its own sheet. Throws missed-roots,
/// polish-failed, or invalid-argument when the region contains a branch
/// point where D vanishes.
ModeSet find_modes(const CavityConfig& cfg, const TransverseMode& mode,
                   const Rect& region, int max_count,
                   const ModeSearchOptions& opts = {});

/// One oriented piece of a contour and the sheet on which D is continued.
struct ContourPiece {
  PathPiece path;
  Sheet sheet;
};

struct Contour {
  std::vector<ContourPiece> pieces;
  /// Required distance between the contour and any zero of D.
  double margin = 0.0;
};

/// Counterclockwise rectangle on one sheet.
Contour rectangle_contour(const Rect& r, const Sheet& sheet = {});

using Kernel = std::function<cplx(cplx)>;

/// (1/(2 pi i)) contour integral of f(z) d ln D/dz. Throws contour-degenerate
/// when D (nearly) vanishes on the contour.
cplx residue_sum(const CavityConfig& cfg, const TransverseMode& mode,
                 const Contour& contour, const Kernel& f, double tau = 0.0,
                 Tolerance tol = {1e-12, 1e-15});

/// int_{-w_max}^{w_max} w Im[d ln D(w + i0)/dw] dw; zero by parity.
/// Throws tail-not-converged when the integrand has not decayed at w_max.
double sum_rule_residual(const CavityConfig& cfg, const TransverseMode& mode,
                         double omega_max, double tau = 0.0);

cplx kernel_T0(cplx z, double Lambda);
cplx kernel_finite_T(cplx z, double tau, double Lambda);

struct GrowthSchedule {
  /// Right edge of the region; 0 picks a default from k, L and the branch
  /// points.
  double X0 = 0.0;
  /// Depth of the region below the real axis; 0 picks 12/L.
  double Y0 = 0.0;
  double factor = 1.5;
  int steps = 4;
  double rel_tol = 1e-8;
};

struct PoleSumResult {
  double value = 0.0;
  cplx zero_sum;
  cplx pole_sum;
  /// (1/(2 pi i)) times the boundary integral outside the imaginary axis.
  cplx boundary;
  /// |value| change between the last two regions.
  double change = 0.0;
  int regions = 0;
  double X = 0.0;
  double Y = 0.0;
  ModeSet modes;
};

/// Per-channel T = 0 energy from the zeros of D. Throws sum-not-converged
/// with the last two partial values when the schedule is exhausted.
PoleSumResult pole_sum_energy_T0(const CavityConfig& cfg,
                                 const TransverseMode& mode, double Lambda,
                                 const GrowthSchedule& schedule = {});

/// Per-channel internal energy at temperature tau from the zeros of D. The
/// imaginary-axis piece ends at Y = (n_max + 1/2) tau; n_max <= 0 picks
/// n_max from 12/L. Growth enlarges n_max and the region together.
PoleSumResult pole_sum_energy_finiteT(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      int n_max = 0, double Lambda = 1.0,
                                      const GrowthSchedule& schedule = {});

/// CSV with header `m,re_omega,im_omega,residual`.
std::string modes_csv(const ModeSet& modes);

}  // namespace casimir
