#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "casimir/errors.hpp"

namespace casimir {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Library-wide default tolerances; every routine takes them explicitly.
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cplx& z) { return std::abs(z); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T centre = f(c);
  T kron = centre * kWgk[7];
  T gauss = centre * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    T sum = f(c - dx) + f(c + dx);
    kron += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  return {a, b, kron * h, magnitude((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over the consecutive
/// intervals of the increasing sequence `points`; the tolerance applies to
/// the whole integral. The returned error is the summed |K15 - G7| panel
/// differences. Throws tolerance-not-met when `max_panels` is exhausted.
template <class T = double, class F>
Estimate<T> integrate_partitioned(F&& f, std::span<const double> points,
                                  Tolerance tol = {}, int max_panels = 4000) {
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0;
  int panels = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) continue;
    auto panel = detail::kronrod_panel<T>(f, points[i - 1], points[i]);
    total += panel.value;
    err += panel.error;
    heap.push(panel);
    ++panels;
  }
  if (heap.empty()) return {T{}, 0.0};
  while (err > std::max(tol.abs, tol.rel * detail::magnitude(total))) {
    if (panels >= max_panels) {
      throw Error(ErrorCode::tolerance_not_met,
                  "adaptive quadrature exhausted its panel budget", err);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel too small to split further; accept what we have.
      heap.push(worst);
      break;
    }
    auto left = detail::kronrod_panel<T>(f, worst.a, mid);
    auto right = detail::kronrod_panel<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the running updates.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum};
}

/// Globally adaptive quadrature on [a, b].
template <class T = double, class F>
Estimate<T> integrate(F&& f, double a, double b, Tolerance tol = {},
                      int max_panels = 4000) {
  if (a == b) return {T{}, 0.0};
  const std::array<double, 2> ends = {a, b};
  return integrate_partitioned<T>(f, ends, tol, max_panels);
}

/// Integral over [a, inf) through x = a + scale * t / (1 - t). Optional
/// `breaks` (x values, any order) seed the initial partition.
template <class T = double, class F>
Estimate<T> integrate_to_infinity(F&& f, double a, Tolerance tol = {},
                                  int max_panels = 4000, double scale = 1.0,
                                  std::span<const double> breaks = {}) {
  auto mapped = [&](double t) -> T {
    const double s = 1.0 - t;
    const double x = a + scale * t / s;
    if (!std::isfinite(x)) return T{};
    T v = f(x);
    return v * (scale / (s * s));
  };
  std::vector<double> points = {0.0, 1.0};
  for (double x : breaks) {
    if (x > a && std::isfinite(x)) points.push_back((x - a) / (x - a + scale));
  }
  std::sort(points.begin(), points.end());
  return integrate_partitioned<T>(mapped, points, tol, max_panels);
}

/// Straight segment a -> b.  `sqrt_start`/`sqrt_end` request the substitution
/// t = u^2 (resp. 1 - u^2), which removes inverse-square-root endpoint
/// singularities such as those at branch points.
struct Segment {
  cplx a, b;
  bool sqrt_start = false;
  bool sqrt_end = false;
};

/// Circular arc centre + radius * exp(i theta), theta0 -> theta1.
struct Arc {
  cplx centre;
  double radius;
  double theta0, theta1;
};

using PathPiece = std::variant<Segment, Arc>;

cplx path_point(const PathPiece& piece, double t);
cplx path_tangent(const PathPiece& piece, double t);
cplx path_start(const PathPiece& piece);
cplx path_end(const PathPiece& piece);

/// Line integral of f along one path piece.
template <class F>
Estimate<cplx> integrate_path(F&& f, const PathPiece& piece, Tolerance tol = {},
                              int max_panels = 4000) {
  auto along = [&](double t) -> cplx {
    return f(path_point(piece, t)) * path_tangent(piece, t);
  };
  return integrate<cplx>(along, 0.0, 1.0, tol, max_panels);
}

/// Total change of arg f along a piece, tracked with step control so that no
/// step turns the phase by more than `max_step` radians.
double arg_change(const std::function<cplx(cplx)>& f, const PathPiece& piece,
                  double max_step = 0.3);

/// Winding number of f around a closed contour. Throws winding-ambiguous if
/// the accumulated phase is further than `margin` (in turns) from an integer,
/// and invalid-argument if the pieces do not close.
int winding_number(const std::function<cplx(cplx)>& f,
                   std::span<const PathPiece> contour, double margin = 0.05);

struct Extrapolation {
  double limit = 0.0;
  double residual = 0.0;
  int order = 0;
};

/// Neville-table polynomial extrapolation of v(h) to h = 0. Residual is the
/// difference between the last two entries of the final row. With `strict`,
/// a residual that fails to halve relative to the previous row's (above a
/// roundoff floor) throws extrapolation-unreliable.
Extrapolation richardson_extrapolate(std::span<const double> h,
                                     std::span<const double> v,
                                     bool strict = false);

using Rational = boost::multiprecision::cpp_rational;

/// Exact Bernoulli number B_n (B_1 = -1/2 convention), 0 <= n <= 30.
Rational bernoulli(int n);
double bernoulli_value(int n);

cplx digamma(cplx w);
cplx coth(cplx z);
cplx cot(cplx z);

/// log(1 - x) without cancellation for small |x|.
cplx log1m(cplx x);

}  // namespace casimir
