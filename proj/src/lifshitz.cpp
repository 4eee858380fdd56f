#include "casimir/lifshitz.hpp"

#include <array>

namespace casimir {

namespace {

constexpr std::array<Polarization, 2> kPolarizations = {Polarization::TE,
                                                        Polarization::TM};

// Bound shape b(xi) = c * exp(-2 xi L) * poly(xi) / (1 - exp(-2 xi L)) of a
// single Matsubara term. Successive ratios are bounded by
// exp(-2 tau L) poly(xi + tau) / poly(xi), which decreases with xi.
struct TailModel {
  double c = 0.0;
  std::function<double(double)> poly;

  double term(double xi, double L) const {
    const double e = std::exp(-2.0 * xi * L);
    return c * e * poly(xi) / (-std::expm1(-2.0 * xi * L));
  }

  // Bound on sum_{m > n} of terms at m tau.
  double tail_after(long n, double tau, double L) const {
    const double xi = (n + 1) * tau;
    const double q = std::exp(-2.0 * tau * L) * poly(xi + tau) / poly(xi);
    if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
    return term(xi, L) / (1.0 - q);
  }
};

// sum'_n term(n) with certified (or, for entropy, estimated) tail.
SeriesResult matsubara_sum(
    const std::function<Estimate<double>(long, Tolerance)>& term, double tau,
    double L, const TailModel& tail, const LifshitzOptions& opts) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::invalid_argument, "tau must be positive");
  }
  SeriesResult out;
  double scale = 0.0;
  for (long n = 0; n <= opts.n_max; ++n) {
    Tolerance tol{opts.k_rel_tol, std::max(opts.abs_tol, 1e-3 * opts.k_rel_tol * scale)};
    const auto t = term(n, tol);
    const double w = n == 0 ? 0.5 : 1.0;
    out.value += w * t.value;
    out.error += w * t.error;
    out.terms = n + 1;
    if (n <= 1) scale = std::max(scale, std::abs(t.value));
    if (n == 0) continue;
    out.tail = tail.tail_after(n, tau, L);
    if (out.tail <= std::max(opts.abs_tol, opts.sum_rel_tol * std::abs(out.value))) {
      out.error += out.tail;
      return out;
    }
  }
  throw Error(ErrorCode::tolerance_not_met,
              "Matsubara sum did not reach its tail tolerance within n_max",
              out.tail);
}

using ChannelFn = std::function<double(const Channel&, double xi)>;

// sum_p int k dk fn(channel(p, k), xi)
Estimate<double> integrated_channels(const CavityConfig& cfg, double tau,
                                     double xi, const ChannelFn& fn,
                                     Tolerance tol) {
  auto f = [&](double k) {
    double s = 0.0;
    for (auto p : kPolarizations) {
      const Channel ch(cfg, {p, k}, tau, false);
      s += fn(ch, xi);
    }
    return s;
  };
  return k_integral(f, xi, cfg.L, tol);
}

SeriesResult scaled(SeriesResult r, double factor) {
  r.value *= factor;
  r.error *= std::abs(factor);
  r.tail *= std::abs(factor);
  return r;
}

}  // namespace

Estimate<double> k_integral(const std::function<double(double)>& f, double xi,
                            double L, Tolerance tol,
                            std::span<const double> k_breaks) {
  auto integrand = [&](double v) {
    const double u = xi + v;
    const double k = std::sqrt(v * (2.0 * xi + v));
    return u * f(k);
  };
  // Breakpoints in v = sqrt(k^2 + xi^2) - xi.
  std::vector<double> vb;
  for (double k : k_breaks) {
    if (k > 0.0 && std::isfinite(k)) vb.push_back(std::hypot(k, xi) - xi);
  }
  return integrate_to_infinity<double>(integrand, 0.0, tol, 8000, 1.0 / L, vb);
}

SeriesResult free_energy(const CavityConfig& cfg, double tau,
                         const LifshitzOptions& opts) {
  validate(cfg);
  const double L = cfg.L;
  // |g| <= x / (1 - x), x <= exp(-2 u L), u >= xi; two polarizations.
  TailModel tail{2.0 / (4.0 * L * L), [L](double xi) { return 2.0 * xi * L + 1.0; }};
  auto term = [&](long n, Tolerance tol) {
    return integrated_channels(
        cfg, tau, n * tau,
        [](const Channel& ch, double xi) { return ch.g_imag(xi); }, tol);
  };
  return scaled(matsubara_sum(term, tau, L, tail, opts), tau / (4.0 * pi * pi));
}

SeriesResult entropy_matsubara(const CavityConfig& cfg, double tau,
                               const LifshitzOptions& opts) {
  validate(cfg);
  const double L = cfg.L;
  const double dgamma = damping_slope(cfg.model, tau);
  // Estimated, not certified: for large xi the xi g_xi term behaves like
  // 2 L xi g, and the tau g_tau term is subdominant.
  TailModel tail{2.0 / (4.0 * L * L), [L](double xi) {
                   return (2.0 * xi * L + 1.0) * (1.0 + 4.0 * xi * L);
                 }};
  auto term = [&](long n, Tolerance tol) {
    return integrated_channels(
        cfg, tau, n * tau,
        [&](const Channel& ch, double xi) {
          if (xi == 0.0) return ch.g_imag(0.0);
          double h = ch.g_imag(xi) + xi * ch.dg_imag(xi);
          if (dgamma != 0.0) h += tau * dgamma * ch.dg_dgamma_imag(xi);
          return h;
        },
        tol);
  };
  return scaled(matsubara_sum(term, tau, L, tail, opts), -1.0 / (2.0 * pi));
}

SeriesResult force(const CavityConfig& cfg, double tau,
                   const LifshitzOptions& opts) {
  validate(cfg);
  const double L = cfg.L;
  // 2 kappa X / (1 - X) <= 2 u x / (1 - x); int_xi^inf u^2 e^{-2uL} du.
  TailModel tail{2.0 * 2.0 / (4.0 * L * L * L), [L](double xi) {
                   return 2.0 * xi * xi * L * L + 2.0 * xi * L + 1.0;
                 }};
  auto term = [&](long n, Tolerance tol) {
    return integrated_channels(
        cfg, tau, n * tau,
        [](const Channel& ch, double xi) { return ch.dg_dL_imag(xi); }, tol);
  };
  return scaled(matsubara_sum(term, tau, L, tail, opts), -tau / (4.0 * pi * pi));
}

namespace {

Estimate<double> imaginary_axis_T0(const CavityConfig& cfg,
                                   const LifshitzOptions& opts,
                                   const ChannelFn& fn, double factor) {
  validate(cfg);
  double inner_err = 0.0;
  auto outer = [&](double xi) {
    const auto e =
        integrated_channels(cfg, 0.0, xi, fn, {opts.k_rel_tol, opts.abs_tol});
    inner_err = std::max(inner_err, e.error);
    return e.value;
  };
  const auto r = integrate_to_infinity<double>(
      outer, 0.0, {10.0 * opts.k_rel_tol, opts.abs_tol}, 4000, 1.0 / cfg.L);
  // Inner errors enter through the outer weights; bound them by the largest
  // inner error times the effective integration length.
  const double err = r.error + inner_err * 20.0 / cfg.L;
  return {factor * r.value, std::abs(factor) * err};
}

}  // namespace

Estimate<double> energy_integral_T0(const CavityConfig& cfg,
                                    const LifshitzOptions& opts) {
  return imaginary_axis_T0(
      cfg, opts, [](const Channel& ch, double xi) { return ch.g_imag(xi); },
      1.0 / (4.0 * pi * pi));
}

Estimate<double> force_integral_T0(const CavityConfig& cfg,
                                   const LifshitzOptions& opts) {
  return imaginary_axis_T0(
      cfg, opts, [](const Channel& ch, double xi) { return ch.dg_dL_imag(xi); },
      -1.0 / (4.0 * pi * pi));
}

ZeroTemperatureLimit zero_temperature_limit(
    const std::function<double(double)>& f, double tau0, int count) {
  if (count < 3 || !(tau0 > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "zero_temperature_limit needs tau0 > 0 and count >= 3");
  }
  ZeroTemperatureLimit out;
  double t = tau0;
  for (int j = 0; j < count; ++j, t *= 0.5) {
    out.taus.push_back(t);
    out.values.push_back(f(t));
  }
  const auto ex = richardson_extrapolate(out.taus, out.values);
  out.value = ex.limit;
  out.residual = ex.residual;
  out.order = ex.order;
  return out;
}

double channel_energy_T0(const CavityConfig& cfg, const TransverseMode& mode,
                         Tolerance tol) {
  const Channel ch(cfg, mode, 0.0, false);
  const auto r = integrate_to_infinity<double>(
      [&](double xi) { return ch.g_imag(xi); }, 0.0, tol, 4000, 1.0 / cfg.L);
  return r.value / pi;
}

namespace {

// Plain single-channel series; stops after three consecutive terms below
// rel_tol of the running sum.
SeriesResult channel_series(const std::function<double(long)>& term,
                            double rel_tol, long n_max) {
  SeriesResult out;
  int quiet = 0;
  for (long n = 0; n <= n_max; ++n) {
    const double t = term(n);
    out.value += t;
    out.terms = n + 1;
    if (n > 0 && std::abs(t) <= rel_tol * std::abs(out.value)) {
      if (++quiet >= 3) {
        out.tail = std::abs(t);
        out.error = out.tail;
        return out;
      }
    } else {
      quiet = 0;
    }
  }
  throw Error(ErrorCode::tolerance_not_met,
              "channel Matsubara sum did not converge within n_max");
}

}  // namespace

SeriesResult channel_free_energy(const CavityConfig& cfg,
                                 const TransverseMode& mode, double tau,
                                 double rel_tol) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  const Channel ch(cfg, mode, tau, false);
  auto r = channel_series(
      [&](long n) {
        return n == 0 ? 0.5 * ch.g_imag(0.0) : ch.g_imag(n * tau);
      },
      rel_tol, 10'000'000);
  return scaled(r, tau / pi);
}

SeriesResult channel_matsubara_energy(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      double rel_tol) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  const Channel ch(cfg, mode, tau, false);
  auto r = channel_series(
      [&](long n) {
        return n == 0 ? 0.0 : static_cast<double>(n) * ch.dg_imag(n * tau);
      },
      rel_tol, 10'000'000);
  return scaled(r, -tau * tau / pi);
}

}  // namespace casimir
