#include "casimir/mirror_models.hpp"

#include <array>

#include "casimir/format.hpp"

namespace casimir {

namespace {

constexpr cplx I{0.0, 1.0};
// Angle between a tilted cut and the downward vertical.
constexpr double kTilt = pi / 8.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

// Roots of the monic cubic z^3 + c2 z^2 + c1 z + c0.
std::array<cplx, 3> cubic_roots(cplx c2, cplx c1, cplx c0) {
  auto p = [&](cplx z) { return ((z + c2) * z + c1) * z + c0; };
  auto dp = [&](cplx z) { return (3.0 * z + 2.0 * c2) * z + c1; };
  const double radius =
      1.0 + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  std::array<cplx, 3> z;
  const cplx seed(0.4, 0.9);
  z[0] = radius * seed;
  z[1] = z[0] * seed;
  z[2] = z[1] * seed;
  for (int it = 0; it < 500; ++it) {
    double change = 0.0;
    for (int i = 0; i < 3; ++i) {
      cplx denom = 1.0;
      for (int j = 0; j < 3; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const cplx step = p(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * radius) break;
  }
  for (auto& r : z) {
    for (int it = 0; it < 3; ++it) {
      const cplx d = dp(r);
      if (d == 0.0) break;
      r -= p(r) / d;
    }
  }
  return z;
}

struct DrudeParams {
  bool material = false;
  double omega_p = 0.0;
  double gamma = 0.0;
};

DrudeParams drude_params(const DielectricModel& model, double tau) {
  DrudeParams out;
  std::visit(Overloaded{
                 [](const PerfectMirror&) {},
                 [](const ConstantR&) {},
                 [&](const Plasma& m) {
                   out = {true, m.omega_p, 0.0};
                 },
                 [&](const Drude& m) {
                   out = {true, m.omega_p, m.gamma0};
                 },
                 [&](const DrudeThermal& m) {
                   out = {true, m.omega_p, m.gamma0 + m.alpha2 * tau * tau};
                 },
             },
             model);
  return out;
}

cplx eps_minus_one(const DrudeParams& d, cplx omega) {
  return -d.omega_p * d.omega_p / (omega * (omega + I * d.gamma));
}

}  // namespace

namespace detail {

cplx tilted_sqrt(cplx w, bool tilt_left) {
  const double cut = -0.5 * pi + (tilt_left ? -kTilt : kTilt);
  const double rot = cut + pi;
  return std::polar(1.0, 0.5 * rot) * std::sqrt(w * std::polar(1.0, -rot));
}

bool tilt_left_for(cplx b, double re_omega, const Sheet& sheet) {
  const double tol = 1e-12 * (1.0 + std::abs(b));
  if (sheet.per_point()) return b.real() <= re_omega + tol;
  if (b.real() <= sheet.lo + tol) return true;
  if (b.real() >= sheet.hi - tol) return false;
  return true;
}

}  // namespace detail

void validate(const DielectricModel& model) {
  std::visit(Overloaded{
                 [](const PerfectMirror&) {},
                 [](const ConstantR& m) {
                   require(m.rho >= 0.0 && m.rho < 1.0,
                           "rho must lie in [0, 1)");
                 },
                 [](const Plasma& m) {
                   require(m.omega_p > 0.0 && std::isfinite(m.omega_p),
                           "omega_p must be positive");
                 },
                 [](const Drude& m) {
                   require(m.omega_p > 0.0 && std::isfinite(m.omega_p),
                           "omega_p must be positive");
                   require(m.gamma0 >= 0.0 && std::isfinite(m.gamma0),
                           "gamma0 must be non-negative");
                 },
                 [](const DrudeThermal& m) {
                   require(m.omega_p > 0.0 && std::isfinite(m.omega_p),
                           "omega_p must be positive");
                   require(m.gamma0 >= 0.0 && std::isfinite(m.gamma0),
                           "gamma0 must be non-negative");
                   require(m.alpha2 >= 0.0 && std::isfinite(m.alpha2),
                           "alpha2 must be non-negative");
                 },
             },
             model);
}

std::string model_name(const DielectricModel& model) {
  const auto f = [](double v) { return format_double(v); };
  return std::visit(
      Overloaded{
          [](const PerfectMirror&) -> std::string { return "perfect"; },
          [&](const ConstantR& m) { return "constant_r(rho=" + f(m.rho) + ")"; },
          [&](const Plasma& m) { return "plasma(omega_p=" + f(m.omega_p) + ")"; },
          [&](const Drude& m) {
            return "drude(omega_p=" + f(m.omega_p) + ";gamma0=" + f(m.gamma0) + ")";
          },
          [&](const DrudeThermal& m) {
            return "drude_thermal(omega_p=" + f(m.omega_p) + ";gamma0=" +
                   f(m.gamma0) + ";alpha2=" + f(m.alpha2) + ")";
          },
      },
      model);
}

bool is_drude_family(const DielectricModel& model) {
  return drude_params(model, 0.0).material;
}

bool is_temperature_dependent(const DielectricModel& model) {
  const auto* m = std::get_if<DrudeThermal>(&model);
  return m != nullptr && m->alpha2 > 0.0;
}

double plasma_frequency(const DielectricModel& model) {
  return drude_params(model, 0.0).omega_p;
}

double damping(const DielectricModel& model, double tau) {
  return drude_params(model, tau).gamma;
}

double damping_slope(const DielectricModel& model, double tau) {
  const auto* m = std::get_if<DrudeThermal>(&model);
  return m == nullptr ? 0.0 : 2.0 * m->alpha2 * tau;
}

cplx permittivity(const DielectricModel& model, cplx omega, double tau) {
  const auto d = drude_params(model, tau);
  if (!d.material) return {std::numeric_limits<double>::infinity(), 0.0};
  if (omega == 0.0) {
    throw Error(ErrorCode::singular_frequency,
                "permittivity of a Drude-family model at zero frequency");
  }
  return 1.0 + eps_minus_one(d, omega);
}

Kappa kappa(double k, cplx omega, const Sheet& sheet) {
  if (k < 0.0) throw Error(ErrorCode::invalid_argument, "k must be >= 0");
  // Material parameters are irrelevant for the vacuum wavenumber.
  ChannelOptics optics(PerfectMirror{}, {Polarization::TE, k}, 0.0);
  const cplx v = optics.at(omega, sheet).kappa;
  return {v, v == 0.0};
}

cplx reflection(const DielectricModel& model, const TransverseMode& mode,
                cplx omega, double tau, const Sheet& sheet) {
  validate(model);
  if (is_drude_family(model) && omega == 0.0) {
    throw Error(ErrorCode::singular_frequency,
                "reflection of a Drude-family model at zero frequency; use "
                "reflection_zero_limit");
  }
  return ChannelOptics(model, mode, tau).at(omega, sheet).r;
}

double reflection_zero_limit(const DielectricModel& model,
                             const TransverseMode& mode, double tau) {
  validate(model);
  if (std::holds_alternative<PerfectMirror>(model)) {
    return mode.p == Polarization::TM ? 1.0 : -1.0;
  }
  if (const auto* m = std::get_if<ConstantR>(&model)) return m->rho;
  if (mode.p == Polarization::TM) return 1.0;
  const auto d = drude_params(model, tau);
  if (d.gamma > 0.0) {
    // r_TE ~ -omega_p^2 xi / (4 gamma k^2) for k > 0; at k = 0 the ratio
    // kappa / kappa_t tends to zero instead.
    return mode.k > 0.0 ? 0.0 : -1.0;
  }
  const double kt = std::sqrt(mode.k * mode.k + d.omega_p * d.omega_p);
  return (mode.k - kt) / (mode.k + kt);
}

ChannelOptics::ChannelOptics(DielectricModel model, TransverseMode mode,
                             double tau, bool continuation)
    : model_(std::move(model)), mode_(mode), tau_(tau),
      continuation_(continuation) {
  if (!(mode_.k >= 0.0) || !std::isfinite(mode_.k)) {
    throw Error(ErrorCode::invalid_argument, "k must be finite and >= 0");
  }
  if (!(tau_ >= 0.0) || !std::isfinite(tau_)) {
    throw Error(ErrorCode::invalid_argument, "tau must be finite and >= 0");
  }
  const auto d = drude_params(model_, tau_);
  material_ = d.material;
  omega_p_ = d.omega_p;
  gamma_ = d.gamma;
  if (!material_ || !continuation_) return;

  const double k2 = mode_.k * mode_.k;
  const double wp2 = omega_p_ * omega_p_;
  if (gamma_ == 0.0) {
    const double w = std::sqrt(k2 + wp2);
    zeros_ = {cplx(w, 0.0), cplx(-w, 0.0)};
  } else {
    // (eps w^2 - k^2)(w + i gamma) = w^3 + i g w^2 - (k^2 + wp^2) w - i g k^2
    auto roots = cubic_roots(I * gamma_, cplx(-(k2 + wp2), 0.0),
                             -I * gamma_ * k2);
    const double scale = std::sqrt(k2 + wp2) + gamma_;
    for (auto& r : roots) {
      // The root set is symmetric under w -> -conj(w); pin the one on the
      // imaginary axis there exactly.
      if (std::abs(r.real()) < 1e-10 * scale) r = cplx(0.0, r.imag());
    }
    zeros_.assign(roots.begin(), roots.end());
    poles_ = {cplx(0.0, -gamma_)};
  }
  // Fix the overall sign by matching the principal branch in the first
  // quadrant, where both forms are continuous.
  double far = 1.0;
  for (const auto& z : zeros_) far = std::max(far, std::abs(z));
  const cplx ref(1.0 + far, 1.0);
  const cplx eps = 1.0 + eps_minus_one(d, ref);
  const cplx principal = std::sqrt(k2 - eps * ref * ref);
  sign_ = 1.0;
  const cplx continued = kappa_t_continued(ref, eps, Sheet{});
  sign_ = (continued / principal).real() > 0.0 ? 1.0 : -1.0;
}

std::vector<cplx> ChannelOptics::branch_points() const {
  std::vector<cplx> out;
  out.emplace_back(mode_.k, 0.0);
  for (const auto& z : zeros_) {
    if (z.real() >= 0.0) out.push_back(z);
  }
  for (const auto& p : poles_) {
    if (p.real() >= 0.0) out.push_back(p);
  }
  return out;
}

cplx ChannelOptics::kappa_t_continued(cplx omega, cplx /*eps*/,
                                      const Sheet& sheet) const {
  const double x = omega.real();
  cplx v = -I * sign_;
  for (const auto& z : zeros_) {
    v *= detail::tilted_sqrt(omega - z, detail::tilt_left_for(z, x, sheet));
  }
  for (const auto& p : poles_) {
    v /= detail::tilted_sqrt(omega - p, detail::tilt_left_for(p, x, sheet));
  }
  return v;
}

LocalOptics ChannelOptics::at(cplx omega, const Sheet& sheet,
                              bool derivatives) const {
  if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag())) {
    throw Error(ErrorCode::invalid_argument, "frequency must be finite");
  }
  if (!continuation_ && material_ && omega.imag() <= 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "channel built without continuation below the real axis");
  }
  if (omega.real() >= 0.0) return at_right(omega, sheet, derivatives);
  // Reality of the response: f(w) = conj f(-conj w).
  Sheet mirrored = sheet;
  if (!sheet.per_point()) mirrored = Sheet{-sheet.hi, -sheet.lo};
  LocalOptics o = at_right(-std::conj(omega), mirrored, derivatives);
  o.eps = std::conj(o.eps);
  o.kappa = std::conj(o.kappa);
  o.kappa_t = std::conj(o.kappa_t);
  o.r = std::conj(o.r);
  o.dr_domega = -std::conj(o.dr_domega);
  o.dkappa_domega = -std::conj(o.dkappa_domega);
  o.dr_dgamma = std::conj(o.dr_dgamma);
  return o;
}

LocalOptics ChannelOptics::at_right(cplx omega, const Sheet& sheet,
                                    bool derivatives) const {
  const double k = mode_.k;
  LocalOptics o{};

  if (k == 0.0) {
    o.kappa = -I * omega;
  } else if (omega.imag() > 0.0) {
    o.kappa = std::sqrt(k * k - omega * omega);
  } else {
    const double x = omega.real();
    const cplx b(k, 0.0);
    o.kappa = -I *
              detail::tilted_sqrt(omega - b, detail::tilt_left_for(b, x, sheet)) *
              detail::tilted_sqrt(omega + b, detail::tilt_left_for(-b, x, sheet));
  }
  if (derivatives) o.dkappa_domega = -omega / o.kappa;

  if (!material_) {
    o.eps = {std::numeric_limits<double>::infinity(), 0.0};
    if (std::holds_alternative<PerfectMirror>(model_)) {
      o.r = mode_.p == Polarization::TM ? 1.0 : -1.0;
    } else {
      o.r = std::get<ConstantR>(model_).rho;
    }
    return o;
  }

  if (omega == 0.0) {
    throw Error(ErrorCode::singular_frequency,
                "Drude-family response at zero frequency");
  }
  const DrudeParams d{true, omega_p_, gamma_};
  const cplx em1 = eps_minus_one(d, omega);
  o.eps = 1.0 + em1;
  if (omega.imag() > 0.0) {
    o.kappa_t = std::sqrt(k * k - o.eps * omega * omega);
  } else {
    o.kappa_t = kappa_t_continued(omega, o.eps, sheet);
  }

  // Cancellation-free numerators: kappa^2 - kappa_t^2 = (eps - 1) w^2 and
  // (eps kappa)^2 - kappa_t^2 = (eps - 1)((eps + 1) k^2 - eps w^2).
  const cplx w2 = omega * omega;
  const cplx ek = o.eps * o.kappa;
  if (mode_.p == Polarization::TE) {
    const cplx s = o.kappa + o.kappa_t;
    o.r = em1 * w2 / (s * s);
  } else {
    const cplx s = ek + o.kappa_t;
    o.r = em1 * ((o.eps + 1.0) * k * k - o.eps * w2) / (s * s);
  }
  if (!derivatives) return o;

  const double wp2 = omega_p_ * omega_p_;
  const cplx q = omega * (omega + I * gamma_);
  const cplx deps = wp2 * (2.0 * omega + I * gamma_) / (q * q);
  const cplx deps_dg =
      I * wp2 / (omega * (omega + I * gamma_) * (omega + I * gamma_));
  const cplx dkt = -(deps * w2 + 2.0 * o.eps * omega) / (2.0 * o.kappa_t);
  const cplx dkt_dg = -deps_dg * w2 / (2.0 * o.kappa_t);
  if (mode_.p == Polarization::TE) {
    const cplx s = o.kappa + o.kappa_t;
    o.dr_domega =
        2.0 * (o.dkappa_domega * o.kappa_t - o.kappa * dkt) / (s * s);
    o.dr_dgamma = -2.0 * o.kappa * dkt_dg / (s * s);
  } else {
    const cplx s = ek + o.kappa_t;
    const cplx dek = deps * o.kappa + o.eps * o.dkappa_domega;
    o.dr_domega = 2.0 * (dek * o.kappa_t - ek * dkt) / (s * s);
    const cplx dek_dg = deps_dg * o.kappa;
    o.dr_dgamma = 2.0 * (dek_dg * o.kappa_t - ek * dkt_dg) / (s * s);
  }
  return o;
}

}  // namespace casimir
