#include "casimir/asymptotics.hpp"

#include <array>
#include <sstream>

#include "casimir/format.hpp"

namespace casimir {

namespace {

constexpr std::array<Polarization, 2> kPolarizations = {Polarization::TE,
                                                        Polarization::TM};

void require_static(const CavityConfig& cfg) {
  validate(cfg);
  if (is_temperature_dependent(cfg.model)) {
    throw Error(ErrorCode::invalid_argument,
                "low-temperature series need temperature-independent r");
  }
}

// Wavenumbers where the slope integrand changes scale: k ~ xi, a geometric
// ladder up to 1/L, and the damped-TE crossover sqrt(xi omega_p^2 / gamma).
std::vector<double> slope_breaks(const CavityConfig& cfg, double xi) {
  std::vector<double> out;
  for (double k = xi; k < 1.0 / cfg.L; k *= 10.0) out.push_back(k);
  const double g = damping(cfg.model, 0.0);
  if (is_drude_family(cfg.model) && g > 0.0) {
    const double wp = plasma_frequency(cfg.model);
    const double kb = std::sqrt(xi * wp * wp / g);
    out.insert(out.end(), {0.25 * kb, kb, 4.0 * kb});
  }
  return out;
}

double polarization_value_at_zero(const CavityConfig& cfg, Polarization p,
                                  Tolerance tol) {
  auto f = [&](double k) {
    const Channel ch(cfg, {p, k}, 0.0, false);
    return ch.g_imag(0.0) / (2.0 * pi);
  };
  return k_integral(f, 0.0, cfg.L, tol).value;
}

// Derivatives at 0 of the Chebyshev interpolant of f on [0, a], orders
// 0 .. max_order, from first-kind nodes (f is never sampled at the ends).
// Coefficients below the noise level are dropped first.
struct ChebyshevDerivatives {
  std::vector<double> d;
  double fmax = 0.0;
};

ChebyshevDerivatives chebyshev_derivatives_at_left(
    const std::function<double(double)>& f, double a, int nodes,
    int max_order, double noise) {
  const int n = nodes;
  std::vector<double> fv(n);
  for (int j = 0; j < n; ++j) {
    const double x = std::cos(pi * (j + 0.5) / n);
    fv[j] = f(0.5 * a * (1.0 + x));
  }
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fv[j] * std::cos(pi * i * (j + 0.5) / n);
    c[i] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  int last = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(c[i]) > noise * cmax) last = i;
  }
  std::vector<double> d(max_order + 1, 0.0);
  for (int r = 0; r <= max_order; ++r) {
    double s = 0.0;
    for (int i = 0; i <= last; ++i) {
      // T_i^{(r)}(-1) = (-1)^{i+r} prod_{l<r} (i^2 - l^2) / (2l + 1)
      double t = ((i + r) % 2 == 0) ? 1.0 : -1.0;
      for (int l = 0; l < r; ++l) t *= double(i * i - l * l) / (2 * l + 1);
      s += c[i] * t;
    }
    d[r] = s * std::pow(2.0 / a, r);
  }
  double fmax = 0.0;
  for (double v : fv) fmax = std::max(fmax, std::abs(v));
  return {d, fmax};
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

Estimate<double> polarization_slope(const CavityConfig& cfg, Polarization p,
                                    double xi, Tolerance tol) {
  if (!(xi > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "polarization_slope needs xi > 0");
  }
  auto f = [&](double k) {
    const Channel ch(cfg, {p, k}, 0.0, false);
    return ch.dg_imag(xi) / (2.0 * pi);
  };
  const auto breaks = slope_breaks(cfg, xi);
  return k_integral(f, xi, cfg.L, tol, breaks);
}

EntropyExpansion entropy_expansion(const CavityConfig& cfg) {
  require_static(cfg);
  const double L = cfg.L;
  const double g = damping(cfg.model, 0.0);
  const bool damped = is_drude_family(cfg.model) && g > 0.0;
  const double wp = plasma_frequency(cfg.model);
  EntropyExpansion out;
  out.radius = damped ? std::min(1.0 / L, g / (wp * wp * L * L)) : 1.0 / L;

  // H'(xi) = H'(0) + a xi^{1/2} + b xi + ... for damped metals, so the
  // sequence xi_j = xi0 4^{-j} is extrapolated in h = sqrt(xi).
  const double xi0 = damped ? 0.1 * g / (wp * wp) : 1e-2 / L;
  const int count = 10;
  for (auto p : kPolarizations) {
    std::vector<double> h, v;
    double xi = xi0;
    for (int j = 0; j < count; ++j, xi *= 0.25) {
      h.push_back(std::sqrt(xi));
      v.push_back(polarization_slope(cfg, p, xi).value);
    }
    // Use the trailing window with the smallest residual.
    Extrapolation best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int w = 3; w <= 6; ++w) {
      const auto ex = richardson_extrapolate(
          std::span<const double>(h).last(w), std::span<const double>(v).last(w));
      if (ex.residual < best.residual) best = ex;
    }
    const double scale = std::abs(best.limit);
    if (!(best.residual <= 1e-3 * scale + 1e-8)) {
      throw Error(ErrorCode::derivative_estimate_failed,
                  "slope of H at xi = 0 did not converge", best.residual);
    }
    const double c1 = best.limit / 6.0;
    const double err = best.residual / 6.0;
    if (p == Polarization::TE) {
      out.c1_te = c1;
      out.error_te = err;
    } else {
      out.c1_tm = c1;
      out.error_tm = err;
    }
  }
  out.c1 = out.c1_te + out.c1_tm;
  return out;
}

double euler_maclaurin_coefficient(int k, int m) {
  if (k < 2 || m < 0) {
    throw Error(ErrorCode::invalid_argument, "series index out of range");
  }
  if (m == 0) return 1.0 / (double(k) * (k - 1));
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  return sign * bernoulli_value(2 * m) * factorial(k + 2 * m - 2) /
         (factorial(k) * 2.0 * m * factorial(2 * m - 2));
}

EulerMaclaurinResult euler_maclaurin_entropy(const CavityConfig& cfg,
                                             double tau, int k_max, int m_max,
                                             double xi_fit) {
  require_static(cfg);
  if (!(tau > 0.0) || k_max < 2 || m_max < 0) {
    throw Error(ErrorCode::invalid_argument,
                "euler_maclaurin_entropy needs tau > 0, k_max >= 2, m_max >= 0");
  }
  // Order tau^q collects the terms k - 2 + 2m = q and is complete when
  // k_max >= q + 2 and m_max >= q / 2; it needs H^{(q+1)}(0), and the
  // derivative order is capped at 6.
  const int top = std::min({k_max - 2, 2 * m_max + 1, 5});
  if (!(xi_fit > 0.0)) {
    const double g = damping(cfg.model, 0.0);
    const double wp = plasma_frequency(cfg.model);
    const bool damped = is_drude_family(cfg.model) && g > 0.0;
    xi_fit = damped ? std::min(0.25 / cfg.L, g / (wp * wp)) : 0.25 / cfg.L;
  }

  const Tolerance tol{1e-10, 1e-300};
  std::vector<double> H(top + 2, 0.0), H_err(top + 2, 0.0);
  double H0 = 0.0;
  for (auto p : kPolarizations) H0 += polarization_value_at_zero(cfg, p, tol);
  H[0] = H0;
  if (top >= 1) {
    auto slope = [&](double xi) {
      double s = 0.0;
      for (auto p : kPolarizations) s += polarization_slope(cfg, p, xi, tol).value;
      return s;
    };
    const auto fine = chebyshev_derivatives_at_left(slope, xi_fit, 28, top, 1e-11);
    const auto coarse = chebyshev_derivatives_at_left(slope, xi_fit, 20, top, 1e-11);
    for (int j = 1; j <= top + 1; ++j) {
      H[j] = fine.d[j - 1];
      H_err[j] = std::abs(fine.d[j - 1] - coarse.d[j - 1]) +
                 1e-10 * fine.fmax * std::pow(2.0 / xi_fit, j - 1);
    }
  }

  EulerMaclaurinResult out;
  out.xi_fit = xi_fit;
  out.groups.assign(top + 1, 0.0);
  std::vector<double> group_err(top + 1, 0.0);
  out.groups[0] = 0.5 * H0;
  for (int k = 2; k <= k_max; ++k) {
    for (int m = 0; m <= m_max; ++m) {
      const int p = k + 2 * m - 1;
      const int q = k - 2 + 2 * m;
      if (q > top) continue;
      // Re[c (-i tau)^{k-2} tau^{2m} (-i)^{p-1} H^{(p-1)}(0) / (p-1)!]
      const cplx phase = std::pow(cplx(0.0, -1.0), k - 2 + p - 1);
      const double w = euler_maclaurin_coefficient(k, m) * std::pow(tau, q) *
                       phase.real() / factorial(p - 1);
      out.groups[q] -= w * H[p - 1];
      group_err[q] += std::abs(w) * H_err[p - 1];
    }
  }
  // Only groups above their own uncertainty take part in the decay test.
  double previous = 0.0;
  double noise = 0.0;
  for (int q = 0; q <= top; ++q) {
    out.value += out.groups[q];
    noise += group_err[q];
    const double mag = std::abs(out.groups[q]);
    if (q == 0 || mag <= group_err[q]) continue;
    if (previous > 0.0 && mag > previous) {
      throw Error(ErrorCode::series_outside_radius,
                  "series terms grow with order; tau outside the expansion radius",
                  mag);
    }
    previous = mag;
    out.truncation = mag;
  }
  out.truncation = std::max(out.truncation, noise);
  return out;
}

std::string to_string(NernstClass c) {
  switch (c) {
    case NernstClass::vanishes: return "vanishes";
    case NernstClass::finite_negative: return "finite-negative";
    case NernstClass::finite_positive: return "finite-positive";
  }
  return "unknown";
}

NernstVerdict residual_entropy(const CavityConfig& cfg, Tolerance tol) {
  validate(cfg);
  NernstVerdict out;
  out.model = model_name(cfg.model);
  const auto* dt = std::get_if<DrudeThermal>(&cfg.model);
  // The n = 0 term jumps away from the limit of the n >= 1 terms only when
  // gamma(0) = 0 while gamma(tau) > 0 for tau > 0.
  out.discontinuity = dt != nullptr && dt->gamma0 == 0.0 && dt->alpha2 > 0.0;
  if (out.discontinuity) {
    auto f = [&](double k) {
      // kappa(i tau) = sqrt(k^2 + tau^2) is smooth in tau only for tau < k.
      GTildeOptions o;
      o.tau0 = 0.05 * std::min(1.0, k * cfg.L);
      return g_tilde_zero(cfg, {Polarization::TE, k}, o) / (2.0 * pi);
    };
    out.residual = 0.5 * k_integral(f, 0.0, cfg.L, tol).value;
  }
  if (std::abs(out.residual) < kNernstTolerance) {
    out.classification = NernstClass::vanishes;
  } else {
    out.classification = out.residual < 0.0 ? NernstClass::finite_negative
                                             : NernstClass::finite_positive;
  }
  return out;
}

std::string nernst_csv(const NernstVerdict& v) {
  std::ostringstream os;
  os << "model,residual,classification,discontinuity\n"
     << v.model << ',' << format_double(v.residual) << ','
     << to_string(v.classification) << ',' << (v.discontinuity ? "true" : "false")
     << '\n';
  return os.str();
}

}  // namespace casimir
