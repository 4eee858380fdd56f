#include "casimir/numerics.hpp"

namespace casimir {

namespace {

struct PointVisitor {
  double t;
  cplx operator()(const Segment& s) const {
    double u = t;
    if (s.sqrt_start && s.sqrt_end) {
      u = 0.5 - 0.5 * std::cos(pi * t);
    } else if (s.sqrt_start) {
      u = t * t;
    } else if (s.sqrt_end) {
      u = 1.0 - (1.0 - t) * (1.0 - t);
    }
    return s.a + (s.b - s.a) * u;
  }
  cplx operator()(const Arc& a) const {
    const double th = a.theta0 + (a.theta1 - a.theta0) * t;
    return a.centre + a.radius * cplx(std::cos(th), std::sin(th));
  }
};

struct TangentVisitor {
  double t;
  cplx operator()(const Segment& s) const {
    double du = 1.0;
    if (s.sqrt_start && s.sqrt_end) {
      du = 0.5 * pi * std::sin(pi * t);
    } else if (s.sqrt_start) {
      du = 2.0 * t;
    } else if (s.sqrt_end) {
      du = 2.0 * (1.0 - t);
    }
    return (s.b - s.a) * du;
  }
  cplx operator()(const Arc& a) const {
    const double dth = a.theta1 - a.theta0;
    const double th = a.theta0 + dth * t;
    return a.radius * dth * cplx(-std::sin(th), std::cos(th));
  }
};

double wrap_phase(double d) {
  while (d > pi) d -= 2.0 * pi;
  while (d <= -pi) d += 2.0 * pi;
  return d;
}

}  // namespace

cplx path_point(const PathPiece& piece, double t) {
  return std::visit(PointVisitor{t}, piece);
}

cplx path_tangent(const PathPiece& piece, double t) {
  return std::visit(TangentVisitor{t}, piece);
}

cplx path_start(const PathPiece& piece) { return path_point(piece, 0.0); }
cplx path_end(const PathPiece& piece) { return path_point(piece, 1.0); }

double arg_change(const std::function<cplx(cplx)>& f, const PathPiece& piece,
                  double max_step) {
  double t = 0.0;
  double dt = 1.0 / 64.0;
  cplx prev = f(path_point(piece, 0.0));
  if (prev == 0.0 || !std::isfinite(std::abs(prev))) {
    throw Error(ErrorCode::winding_ambiguous, "function vanishes on the contour");
  }
  double total = 0.0;
  while (t < 1.0) {
    const double step = std::min(dt, 1.0 - t);
    const cplx next = f(path_point(piece, t + step));
    if (next == 0.0 || !std::isfinite(std::abs(next))) {
      throw Error(ErrorCode::winding_ambiguous,
                  "function vanishes on the contour");
    }
    const double d = wrap_phase(std::arg(next) - std::arg(prev));
    // A zero close to the path (a double one especially) can turn the phase
    // by a full 2 pi within one step; the midpoint exposes it by a dip in |f|
    // or a phase that does not interpolate.
    const cplx mid = f(path_point(piece, t + 0.5 * step));
    const double d1 = wrap_phase(std::arg(mid) - std::arg(prev));
    const bool aliased = std::abs(mid) < 0.5 * std::min(std::abs(prev), std::abs(next)) ||
                         std::abs(d1 + wrap_phase(std::arg(next) - std::arg(mid)) - d) > 1e-9 ||
                         std::abs(d1) > max_step;
    if ((std::abs(d) > max_step || aliased) && step > 1e-13) {
      dt = step * 0.5;
      continue;
    }
    total += d;
    prev = next;
    t += step;
    if (std::abs(d) < 0.25 * max_step) dt = std::min(dt * 2.0, 1.0 / 16.0);
  }
  return total;
}

int winding_number(const std::function<cplx(cplx)>& f,
                   std::span<const PathPiece> contour, double margin) {
  if (contour.empty()) {
    throw Error(ErrorCode::invalid_argument, "empty contour");
  }
  const double scale = [&] {
    double s = 0.0;
    for (const auto& p : contour) s = std::max(s, std::abs(path_start(p)));
    return std::max(s, 1.0);
  }();
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const cplx end = path_end(contour[i]);
    const cplx next = path_start(contour[(i + 1) % contour.size()]);
    if (std::abs(end - next) > 1e-9 * scale) {
      throw Error(ErrorCode::invalid_argument, "contour pieces do not close");
    }
  }
  double total = 0.0;
  for (const auto& p : contour) total += arg_change(f, p);
  const double turns = total / (2.0 * pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > margin) {
    throw Error(ErrorCode::winding_ambiguous,
                "phase change is not close to an integer number of turns",
                std::abs(turns - rounded));
  }
  return static_cast<int>(rounded);
}

Extrapolation richardson_extrapolate(std::span<const double> h,
                                     std::span<const double> v, bool strict) {
  const std::size_t n = h.size();
  if (n != v.size() || n < 1) {
    throw Error(ErrorCode::invalid_argument,
                "richardson: step and value sequences differ in length");
  }
  if (n < 3 && strict) {
    throw Error(ErrorCode::invalid_argument,
                "richardson: at least three points are required");
  }
  // Neville table; row i holds the extrapolations using points 0..i.
  std::vector<double> residuals;
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    table[i].resize(i + 1);
    table[i][0] = v[i];
    for (std::size_t j = 1; j <= i; ++j) {
      const double denom = h[i - j] - h[i];
      if (denom == 0.0) {
        throw Error(ErrorCode::invalid_argument, "richardson: repeated step");
      }
      table[i][j] = table[i][j - 1] +
                    (table[i][j - 1] - table[i - 1][j - 1]) * h[i] / denom;
    }
    if (i >= 1) residuals.push_back(std::abs(table[i][i] - table[i][i - 1]));
  }
  Extrapolation out;
  out.limit = table[n - 1][n - 1];
  out.residual = residuals.empty() ? 0.0 : residuals.back();
  out.order = static_cast<int>(n) - 1;
  if (strict && residuals.size() >= 2) {
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() *
        std::max(std::abs(out.limit), 1e-300);
    const double last = residuals[residuals.size() - 1];
    const double before = residuals[residuals.size() - 2];
    if (last > 0.5 * before && last > floor) {
      throw Error(ErrorCode::extrapolation_unreliable,
                  "extrapolation residual stopped contracting", last);
    }
  }
  return out;
}

Rational bernoulli(int n) {
  if (n < 0 || n > 30) {
    throw Error(ErrorCode::out_of_range, "bernoulli: order must be in [0, 30]");
  }
  std::vector<Rational> b(n + 1);
  b[0] = 1;
  for (int m = 1; m <= n; ++m) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    Rational acc = 0;
    boost::multiprecision::cpp_int binom = 1;  // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += Rational(binom) * b[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b[m] = -acc / Rational(binom);
  }
  return b[n];
}

double bernoulli_value(int n) { return bernoulli(n).convert_to<double>(); }

cplx cot(cplx z) {
  if (z.imag() < 0.0) return -cot(-z);
  // q = exp(2 i z), |q| <= 1 for Im z >= 0.
  const cplx q = std::exp(cplx(0.0, 2.0) * z);
  return cplx(0.0, 1.0) * (q + 1.0) / (q - 1.0);
}

cplx coth(cplx z) {
  if (z.real() < 0.0) return -coth(-z);
  const cplx q = std::exp(-2.0 * z);
  return (1.0 + q) / (1.0 - q);
}

cplx digamma(cplx w) {
  if (w.real() <= 0.0 && w.imag() == 0.0 && w.real() == std::floor(w.real())) {
    throw Error(ErrorCode::on_pole, "digamma at a non-positive integer");
  }
  if (w.real() < 0.5) {
    // psi(w) = psi(1 - w) - pi cot(pi w)
    return digamma(1.0 - w) - pi * cot(pi * w);
  }
  cplx shift = 0.0;
  while (std::abs(w) < 12.0) {
    shift -= 1.0 / w;
    w += 1.0;
  }
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  // Asymptotic series: ln w - 1/(2w) - sum B_2k / (2k w^{2k}).
  static const std::array<double, 8> coeffs = [] {
    std::array<double, 8> c{};
    for (int k = 1; k <= 8; ++k) c[k - 1] = bernoulli_value(2 * k) / (2.0 * k);
    return c;
  }();
  cplx series = 0.0;
  cplx p = inv2;
  for (double c : coeffs) {
    series += c * p;
    p *= inv2;
  }
  return shift + std::log(w) - 0.5 * inv - series;
}

cplx log1m(cplx x) {
  if (std::abs(x) < 1e-3) {
    cplx term = x;
    cplx sum = 0.0;
    for (int k = 1; k < 12; ++k) {
      sum -= term / static_cast<double>(k);
      term *= x;
    }
    return sum;
  }
  return std::log(1.0 - x);
}

}  // namespace casimir
