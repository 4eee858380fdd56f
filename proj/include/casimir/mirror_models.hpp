#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "casimir/numerics.hpp"

// Units throughout: hbar = c = k_B = 1. Lengths are in a caller-chosen
// reference length, frequencies in the matching inverse length.

namespace casimir {

/// Ideal conductor: r_TM = 1, r_TE = -1 at every frequency.
struct PerfectMirror {};

/// Frequency-independent reflection amplitude for both polarizations.
/// Not causal; kept as a test model because its cavity zeros are known in
/// closed form.
struct ConstantR {
  double rho = 0.0;
};

struct Plasma {
  double omega_p = 1.0;
};

struct Drude {
  double omega_p = 1.0;
  double gamma0 = 0.0;
};

/// Drude metal with damping gamma(tau) = gamma0 + alpha2 * tau^2.
struct DrudeThermal {
  double omega_p = 1.0;
  double gamma0 = 0.0;
  double alpha2 = 0.0;
};

using DielectricModel =
    std::variant<PerfectMirror, ConstantR, Plasma, Drude, DrudeThermal>;

/// Throws invalid-argument naming the offending parameter.
void validate(const DielectricModel& model);

std::string model_name(const DielectricModel& model);

/// True for Plasma, Drude and DrudeThermal (permittivity diverges at 0).
bool is_drude_family(const DielectricModel& model);
bool is_temperature_dependent(const DielectricModel& model);
double plasma_frequency(const DielectricModel& model);
/// gamma(tau); zero for non-Drude models.
double damping(const DielectricModel& model, double tau);
/// d gamma / d tau.
double damping_slope(const DielectricModel& model, double tau);

enum class Polarization { TE, TM };

struct TransverseMode {
  Polarization p = Polarization::TE;
  double k = 0.0;
};

inline const char* to_string(Polarization p) {
  return p == Polarization::TE ? "TE" : "TM";
}

/// Selects the branch of the square roots below the real axis.
///
/// Below the real axis the vacuum and material wavenumbers are continued
/// from the upper half plane with branch cuts running downward from each
/// branch point. A sheet for the vertical strip lo <= Re w <= hi tilts every
/// cut away from the strip, so the functions are analytic on the whole strip.
/// The default sheet picks the strip per evaluation point (vertical cuts).
struct Sheet {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();

  static Sheet strip(double lo, double hi) { return {lo, hi}; }
  bool per_point() const { return std::isnan(lo); }
};

/// Permittivity eps(w, tau). Drude-family models throw singular-frequency at
/// w = 0; perfect and constant-r models have no permittivity (returns inf).
cplx permittivity(const DielectricModel& model, cplx omega, double tau);

struct Kappa {
  cplx value;
  bool branch_point = false;
};

/// kappa = sqrt(k^2 - w^2) with Re kappa >= 0 in the upper half plane and on
/// the imaginary axis; continued below the real axis on the given sheet.
Kappa kappa(double k, cplx omega, const Sheet& sheet = {});

/// Fresnel reflection amplitude of a vacuum / half-space interface.
cplx reflection(const DielectricModel& model, const TransverseMode& mode,
                cplx omega, double tau, const Sheet& sheet = {});

/// lim_{xi -> 0+} r(i xi, tau).
double reflection_zero_limit(const DielectricModel& model,
                             const TransverseMode& mode, double tau);

/// Everything the spectral functions need at one complex frequency.
struct LocalOptics {
  cplx eps;
  cplx kappa;
  cplx kappa_t;
  cplx r;
  cplx dr_domega;
  cplx dkappa_domega;
  cplx dr_dgamma;
};

/// Per-channel optics with the branch structure of kappa and kappa_t
/// precomputed. Cheap to copy; immutable after construction.
class ChannelOptics {
 public:
  /// Without `continuation`, only Im w > 0 may be evaluated; the branch
  /// points below the real axis are then never computed.
  ChannelOptics(DielectricModel model, TransverseMode mode, double tau,
                bool continuation = true);

  LocalOptics at(cplx omega, const Sheet& sheet = {},
                 bool derivatives = false) const;

  /// Branch points with Re >= 0 of kappa and kappa_t (closed lower half plane).
  std::vector<cplx> branch_points() const;

  const DielectricModel& model() const { return model_; }
  const TransverseMode& mode() const { return mode_; }
  double tau() const { return tau_; }
  double gamma() const { return gamma_; }

 private:
  LocalOptics at_right(cplx omega, const Sheet& sheet, bool derivatives) const;
  cplx kappa_t_continued(cplx omega, cplx eps, const Sheet& sheet) const;

  DielectricModel model_;
  TransverseMode mode_;
  double tau_;
  double omega_p_ = 0.0;
  double gamma_ = 0.0;
  bool material_ = false;
  bool continuation_ = true;
  // eps w^2 - k^2 = prod (w - zeros) / prod (w - poles)
  std::vector<cplx> zeros_;
  std::vector<cplx> poles_;
  double sign_ = 1.0;
};

namespace detail {
/// sqrt with its cut along arg = -pi/2 -/+ tilt (left / right of downward).
cplx tilted_sqrt(cplx w, bool tilt_left);
bool tilt_left_for(cplx branch_point, double re_omega, const Sheet& sheet);
}  // namespace detail

}  // namespace casimir
