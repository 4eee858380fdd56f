#include "casimir/spectral.hpp"

#include <sstream>

#include "casimir/format.hpp"

namespace casimir {

namespace {

constexpr cplx I{0.0, 1.0};

bool on_resonance(const SpectralPoint& p) {
  return std::abs(p.D) <= 1e-15 * (1.0 + std::abs(p.X));
}

}  // namespace

void validate(const CavityConfig& cfg) {
  if (!(cfg.L > 0.0) || !std::isfinite(cfg.L)) {
    throw Error(ErrorCode::invalid_argument, "L must be positive");
  }
  validate(cfg.model);
}

Channel::Channel(const CavityConfig& cfg, const TransverseMode& mode,
                 double tau, bool continuation)
    : optics_(cfg.model, mode, tau, continuation), L_(cfg.L) {
  validate(cfg);
}

SpectralPoint Channel::at(cplx omega, const Sheet& sheet,
                          bool derivatives) const {
  const LocalOptics o = optics_.at(omega, sheet, derivatives);
  SpectralPoint p{};
  p.kappa = o.kappa;
  const cplx e = std::exp(-2.0 * o.kappa * L_);
  p.X = o.r * o.r * e;
  p.D = 1.0 - p.X;
  p.lnD = log1m(p.X);
  if (!derivatives) return p;
  const cplx dX = 2.0 * o.r * o.dr_domega * e - 2.0 * L_ * o.dkappa_domega * p.X;
  p.dlnD_domega = -dX / p.D;
  p.dlnD_dL = 2.0 * o.kappa * p.X / p.D;
  p.dlnD_dgamma = -2.0 * o.r * o.dr_dgamma * e / p.D;
  return p;
}

double Channel::g_imag(double xi) const {
  if (xi == 0.0) {
    const double r0 =
        reflection_zero_limit(optics_.model(), optics_.mode(), optics_.tau());
    // 1 - r0^2 e^{-2kL} = (1 - r0^2) - r0^2 expm1(-2kL), exact as k -> 0
    const double em = std::expm1(-2.0 * k() * L_);
    const double r2 = r0 * r0;
    if (r2 == 1.0) return std::log(-em);
    return std::log1p(-r2 - r2 * em);
  }
  return at(cplx(0.0, xi), {}, false).lnD.real();
}

double Channel::dg_imag(double xi) const {
  // d/dxi g(i xi) = i (d ln D / d w)
  return (I * at(cplx(0.0, xi)).dlnD_domega).real();
}

double Channel::dg_dgamma_imag(double xi) const {
  if (!is_drude_family(optics_.model())) return 0.0;
  return at(cplx(0.0, xi)).dlnD_dgamma.real();
}

double Channel::dg_dL_imag(double xi) const {
  if (xi == 0.0) {
    const double r0 =
        reflection_zero_limit(optics_.model(), optics_.mode(), optics_.tau());
    const double X = r0 * r0 * std::exp(-2.0 * k() * L_);
    if (k() == 0.0) return X == 1.0 ? 1.0 / L_ : 0.0;
    return 2.0 * k() * X / (1.0 - X);
  }
  return at(cplx(0.0, xi)).dlnD_dL.real();
}

cplx g_value(const CavityConfig& cfg, const TransverseMode& mode, cplx omega,
             double tau) {
  const Channel ch(cfg, mode, tau);
  const auto p = ch.at(omega, {}, false);
  if (on_resonance(p)) {
    throw Error(ErrorCode::singular_spectral_point,
                "r^2 exp(-2 kappa L) = 1 at the evaluation point");
  }
  return p.lnD;
}

cplx dispersion(const CavityConfig& cfg, const TransverseMode& mode,
                cplx omega, double tau) {
  return Channel(cfg, mode, tau).at(omega, {}, false).D;
}

cplx dlnD_domega(const CavityConfig& cfg, const TransverseMode& mode,
                 cplx omega, double tau) {
  const auto p = Channel(cfg, mode, tau).at(omega);
  if (on_resonance(p)) {
    throw Error(ErrorCode::on_pole, "d ln D / d w at a zero of D");
  }
  return p.dlnD_domega;
}

cplx dlnD_dL(const CavityConfig& cfg, const TransverseMode& mode, cplx omega,
             double tau) {
  const auto p = Channel(cfg, mode, tau).at(omega);
  if (on_resonance(p)) {
    throw Error(ErrorCode::on_pole, "d ln D / d L at a zero of D");
  }
  return p.kappa * (1.0 + p.X) / p.D;
}

namespace {

struct Running {
  std::vector<double> h, v;
  double best = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  double last = std::numeric_limits<double>::quiet_NaN();

  // Extrapolate over the trailing window and compare with the previous
  // extrapolation.
  void push(double step, double value) {
    h.push_back(step);
    v.push_back(value);
    const std::size_t w = std::min<std::size_t>(h.size(), 5);
    const auto ex = richardson_extrapolate(
        std::span<const double>(h).last(w), std::span<const double>(v).last(w));
    if (std::isfinite(last)) {
      const double err = std::abs(ex.limit - last);
      if (err < best_err) {
        best_err = err;
        best = ex.limit;
      }
    }
    last = ex.limit;
  }
};

}  // namespace

ZeroDerivatives g_derivatives_at_zero(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      double abs_tol) {
  const Channel ch(cfg, mode, tau);
  const double g0 = ch.g_imag(0.0);
  if (!std::isfinite(g0)) {
    throw Error(ErrorCode::derivative_estimate_failed,
                "g diverges at zero frequency for this channel");
  }
  // g is analytic in xi below the smallest scale of the channel: 1/L, k and,
  // for damped metals, gamma and gamma k^2 / omega_p^2 (where the material
  // wavenumber crosses over). The closed-form slope is extrapolated to 0+,
  // and the curvature from one-sided differences of the slope.
  double scale = 1.0 / cfg.L;
  if (mode.k > 0.0) scale = std::min(scale, mode.k);
  const double gamma = damping(cfg.model, tau);
  if (is_drude_family(cfg.model) && gamma > 0.0) {
    const double wp = plasma_frequency(cfg.model);
    scale = std::min(scale, gamma);
    if (mode.k > 0.0) scale = std::min(scale, gamma * mode.k * mode.k / (wp * wp));
  }
  Running d1, d2;
  double h = 0.25 * scale;
  double s_h = ch.dg_imag(h);
  double s_2h = ch.dg_imag(2.0 * h);
  for (int j = 0; j < 40; ++j) {
    d1.push(h, s_h);
    d2.push(h, (s_2h - s_h) / h);
    if (d1.best_err < abs_tol && d2.best_err < abs_tol) break;
    h *= 0.5;
    s_2h = s_h;
    s_h = ch.dg_imag(h);
  }
  ZeroDerivatives out{d1.best, d2.best, d1.best_err, d2.best_err};
  const double loose = 1e-4;
  if (d1.best_err > loose * (1.0 + std::abs(d1.best)) ||
      d2.best_err > loose * (1.0 + std::abs(d2.best))) {
    throw Error(ErrorCode::derivative_estimate_failed,
                "extrapolated difference quotients did not settle",
                std::max(d1.best_err, d2.best_err));
  }
  return out;
}

double g_tilde_zero(const CavityConfig& cfg, const TransverseMode& mode,
                    const GTildeOptions& opts) {
  validate(cfg);
  if (opts.alpha == 0.0 || opts.alpha.imag() < 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "alpha must be nonzero with Im alpha >= 0");
  }
  if (opts.points < 3 || !(opts.tau0 > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "g_tilde_zero needs tau0 > 0 and at least three points");
  }
  // Only a damping that vanishes with tau makes g(alpha tau, tau) depend on
  // the path; otherwise g is continuous at the origin and the limit is g(0).
  const auto* thermal = std::get_if<DrudeThermal>(&cfg.model);
  if (!thermal || thermal->gamma0 > 0.0) return Channel(cfg, mode, 0.0).g_imag(0.0);
  std::vector<double> taus, re, im;
  double t = opts.tau0;
  for (int j = 0; j < opts.points; ++j, t *= 0.5) {
    const Channel ch(cfg, mode, t);
    const cplx g = ch.at(opts.alpha * t, {}, false).lnD;
    taus.push_back(t);
    re.push_back(g.real());
    im.push_back(g.imag());
  }
  const auto ex = richardson_extrapolate(taus, re);
  const auto ex_im = richardson_extrapolate(taus, im);
  const double scale = 1.0 + std::abs(ex.limit);
  if (!std::isfinite(ex.limit) || ex.residual > 1e-8 * scale ||
      std::abs(ex_im.limit) > 1e-8 * scale) {
    throw Error(ErrorCode::limit_not_attained,
                "g(alpha tau, tau) did not converge as tau -> 0",
                ex.residual);
  }
  return ex.limit;
}

SpectralCurve sample_g_curve(const CavityConfig& cfg, const TransverseMode& mode,
                             double tau, std::span<const double> xi) {
  if (xi.empty()) throw Error(ErrorCode::invalid_argument, "empty xi grid");
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!(xi[i] > 0.0) || (i > 0 && !(xi[i] > xi[i - 1]))) {
      throw Error(ErrorCode::invalid_argument,
                  "xi grid must be positive and strictly increasing");
    }
  }
  const Channel ch(cfg, mode, tau);
  SpectralCurve out{mode, {xi.begin(), xi.end()}, {}};
  out.g.reserve(xi.size());
  for (double x : xi) out.g.push_back(ch.g_imag(x));
  return out;
}

std::string spectral_curves_csv(const SpectralCurve& te,
                                const SpectralCurve& tm) {
  if (te.xi != tm.xi) {
    throw Error(ErrorCode::invalid_argument, "TE and TM grids differ");
  }
  std::ostringstream os;
  os << "xi,g_te,g_tm\n";
  for (std::size_t i = 0; i < te.xi.size(); ++i) {
    os << format_double(te.xi[i]) << ',' << format_double(te.g[i]) << ','
       << format_double(tm.g[i]) << '\n';
  }
  return os.str();
}

}  // namespace casimir
