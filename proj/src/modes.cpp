#include "casimir/modes.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "casimir/format.hpp"

namespace casimir {

namespace {

constexpr cplx I{0.0, 1.0};

struct Cell {
  Rect r;
  Sheet sheet;
};

std::vector<PathPiece> rect_path(const Rect& r) {
  const cplx a(r.re_min, r.im_min), b(r.re_max, r.im_min);
  const cplx c(r.re_max, r.im_max), d(r.re_min, r.im_max);
  return {Segment{a, b}, Segment{b, c}, Segment{c, d}, Segment{d, a}};
}

double diameter(const Rect& r) {
  return std::hypot(r.re_max - r.re_min, r.im_max - r.im_min);
}

cplx centre(const Rect& r) {
  return {0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max)};
}

// D, its log-derivative, and the TM reflection denominator on a sheet.
class Dispersion {
 public:
  Dispersion(const CavityConfig& cfg, const TransverseMode& mode, double tau)
      : ch_(cfg, mode, tau),
        has_poles_(is_drude_family(cfg.model) && mode.p == Polarization::TM) {}

  cplx D(cplx z, const Sheet& s) const { return ch_.at(z, s, false).D; }
  cplx dlnD(cplx z, const Sheet& s) const { return ch_.at(z, s, true).dlnD_domega; }
  double scale(cplx z, const Sheet& s) const {
    return 1.0 + std::abs(ch_.at(z, s, false).X);
  }
  // Zeros of eps kappa + kappa_t are the poles of r_TM, double poles of D.
  cplx reflection_denominator(cplx z, const Sheet& s) const {
    const auto o = ch_.optics().at(z, s, false);
    return o.eps * o.kappa + o.kappa_t;
  }
  bool has_poles() const { return has_poles_; }
  const Channel& channel() const { return ch_; }

 private:
  Channel ch_;
  bool has_poles_;
};

int winding(const std::function<cplx(cplx)>& f, const Rect& r) {
  double total = 0.0;
  for (const auto& piece : rect_path(r)) total += arg_change(f, piece);
  const double turns = total / (2.0 * pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) {
    throw Error(ErrorCode::winding_ambiguous,
                "phase change is not close to an integer number of turns",
                std::abs(turns - rounded));
  }
  return static_cast<int>(rounded);
}

struct Counts {
  int zeros = 0;
  int poles = 0;  // zeros of the reflection denominator
};

Counts count(const Dispersion& d, const Cell& c) {
  const int w = winding([&](cplx z) { return d.D(z, c.sheet); }, c.r);
  int p = 0;
  if (d.has_poles()) {
    p = winding([&](cplx z) { return d.reflection_denominator(z, c.sheet); }, c.r);
  }
  return {w + 2 * p, p};
}

// Rectangle edges split at branch points lying on them, with square-root
// endpoint flags there; ln D' is integrable but unbounded at such points.
std::vector<PathPiece> split_path(const Dispersion& d, const Rect& r) {
  std::vector<PathPiece> out;
  for (const auto& piece : rect_path(r)) {
    const auto& seg = std::get<Segment>(piece);
    const cplx dir = seg.b - seg.a;
    std::vector<double> cuts;
    for (const auto& b : d.channel().branch_points()) {
      const double t = std::real((b - seg.a) / dir);
      const double off = std::abs(std::imag((b - seg.a) / dir)) * std::abs(dir);
      if (t > 1e-12 && t < 1 - 1e-12 && off < 1e-12 * (1.0 + std::abs(b))) {
        cuts.push_back(t);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cplx from = seg.a;
    bool flag = false;
    for (double t : cuts) {
      const cplx to = seg.a + t * dir;
      out.push_back(Segment{from, to, flag, true});
      from = to;
      flag = true;
    }
    out.push_back(Segment{from, seg.b, flag, false});
  }
  return out;
}

// (1/(2 pi i)) oint z dlnD dz = sum zeros - sum pole orders * position.
// Segments flagged with a square-root end stop short of the branch point:
// within delta of it D = 1 - X has lost most of its digits. K is constant on
// the last stretch, so that piece is K (ln D(b) - ln D(b - delta)).
cplx trimmed_integral(const Dispersion& d, const Kernel& f, const ContourPiece& piece,
                      Tolerance tol) {
  auto integrand = [&](cplx z) { return f(z) * d.dlnD(z, piece.sheet); };
  const auto* seg = std::get_if<Segment>(&piece.path);
  if (seg == nullptr || (!seg->sqrt_start && !seg->sqrt_end)) {
    return integrate_path(integrand, piece.path, tol, 20000).value;
  }
  const cplx dir = (seg->b - seg->a) / std::abs(seg->b - seg->a);
  auto end_piece = [&](cplx from, cplx to) {
    return f(to) * std::log(d.D(to, piece.sheet) / d.D(from, piece.sheet));
  };
  Segment inner = *seg;
  cplx sum = 0.0;
  if (seg->sqrt_start) {
    inner.a = seg->a + 1e-8 * std::max(1.0, std::abs(seg->a)) * dir;
    sum += end_piece(seg->a, inner.a);
  }
  if (seg->sqrt_end) {
    inner.b = seg->b - 1e-8 * std::max(1.0, std::abs(seg->b)) * dir;
    sum += end_piece(inner.b, seg->b);
  }
  return sum + integrate_path(integrand, PathPiece{inner}, tol, 20000).value;
}

// NaN when the quadrature fails; callers then fall back to the cell centre.
cplx first_moment(const Dispersion& d, const Cell& c) {
  const Kernel z = [](cplx w) { return w; };
  cplx sum = 0.0;
  try {
    for (const auto& piece : split_path(d, c.r)) {
      sum += trimmed_integral(d, z, {piece, c.sheet}, {1e-9, 1e-12});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::tolerance_not_met) throw;
    return {std::nan(""), 0.0};
  }
  return sum / (2.0 * pi * I);
}

struct Found {
  std::vector<std::pair<cplx, int>> zeros;
  std::vector<std::pair<cplx, int>> poles;
};

bool near_cell(cplx z, const Rect& r) {
  const double pad = 0.25 * diameter(r) + 1e-9 * (1.0 + std::abs(z));
  return z.real() >= r.re_min - pad && z.real() <= r.re_max + pad &&
         z.imag() >= r.im_min - pad && z.imag() <= r.im_max + pad;
}

// Lossless modes on the real axis come out of Newton with |Im| at rounding
// level, on either side.
cplx snap_to_real(const Dispersion& d, const Cell& c, cplx z,
                  const ModeSearchOptions& opts) {
  if (z.imag() == 0.0 || std::abs(z.imag()) > 1e-12 * (1.0 + std::abs(z))) return z;
  const auto p = d.channel().at(cplx(z.real(), 0.0), c.sheet, false);
  if (std::abs(p.D) < opts.polish_tol * (1.0 + std::abs(p.X))) return {z.real(), 0.0};
  return z;
}

cplx polish_zero(const Dispersion& d, const Cell& c, cplx z, int m,
                 const ModeSearchOptions& opts) {
  for (int it = 0; it < 100; ++it) {
    const auto p = d.channel().at(z, c.sheet, true);
    if (std::abs(p.D) < opts.polish_tol * (1.0 + std::abs(p.X))) {
      if (!near_cell(z, c.r)) break;
      return snap_to_real(d, c, z, opts);
    }
    const cplx step = static_cast<double>(m) / p.dlnD_domega;
    if (!std::isfinite(std::abs(step))) break;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) {
      const auto q = d.channel().at(z, c.sheet, false);
      if (std::abs(q.D) < 1e3 * opts.polish_tol * (1.0 + std::abs(q.X)) &&
          near_cell(z, c.r)) {
        return snap_to_real(d, c, z, opts);
      }
      break;
    }
  }
  std::ostringstream os;
  os << "Newton polish stagnated near " << z.real() << (z.imag() < 0 ? "" : "+")
     << z.imag() << "i";
  throw Error(ErrorCode::polish_failed, os.str());
}

// D ~ c (z - p)^{-2m} near a pole of order 2m.
cplx polish_pole(const Dispersion& d, const Cell& c, cplx z, int order) {
  for (int it = 0; it < 100; ++it) {
    const cplx step = static_cast<double>(order) / d.dlnD(z, c.sheet);
    if (!std::isfinite(std::abs(step))) return z;
    z += step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) {
      if (near_cell(z, c.r)) return z;
      break;
    }
  }
  throw Error(ErrorCode::polish_failed, "pole iteration did not converge");
}

void search(const Dispersion& d, const Cell& c, Counts n, int depth,
            const ModeSearchOptions& opts, Found& out) {
  if (n.zeros == 0 && n.poles == 0) return;
  const double size = diameter(c.r);
  const bool tiny = size < 1e-9 * (1.0 + std::abs(centre(c.r))) ||
                    depth >= opts.max_depth;
  if ((n.zeros == 1 && n.poles == 0) || (tiny && n.poles == 0)) {
    cplx guess = first_moment(d, c) / static_cast<double>(n.zeros);
    if (!std::isfinite(std::abs(guess))) guess = centre(c.r);
    try {
      out.zeros.emplace_back(polish_zero(d, c, guess, n.zeros, opts), n.zeros);
      return;
    } catch (const Error& e) {
      // A poor starting point; a smaller cell gives a better one.
      if (e.code() != ErrorCode::polish_failed || tiny) throw;
    }
  } else if ((n.zeros == 0 && n.poles == 1) || (tiny && n.zeros == 0)) {
    const int order = 2 * n.poles;
    cplx guess = -first_moment(d, c) / static_cast<double>(order);
    if (!std::isfinite(std::abs(guess))) guess = centre(c.r);
    out.poles.emplace_back(polish_pole(d, c, guess, order), order);
    return;
  }
  if (tiny) {
    throw Error(ErrorCode::missed_roots,
                "zeros and poles of D could not be separated");
  }
  // Bisect the longer side, off-centre so that symmetric zero lattices do
  // not land on the cut line; retry elsewhere if a zero sits on it.
  const bool vertical_cut = (c.r.re_max - c.r.re_min) >= (c.r.im_max - c.r.im_min);
  for (double f : {0.5137, 0.4561, 0.5873, 0.3929, 0.6312}) {
    Cell a = c, b = c;
    if (vertical_cut) {
      const double x = c.r.re_min + f * (c.r.re_max - c.r.re_min);
      a.r.re_max = x;
      b.r.re_min = x;
    } else {
      const double y = c.r.im_min + f * (c.r.im_max - c.r.im_min);
      a.r.im_max = y;
      b.r.im_min = y;
    }
    Counts na, nb;
    try {
      na = count(d, a);
      nb = count(d, b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::winding_ambiguous) continue;
      throw;
    }
    if (na.zeros + nb.zeros != n.zeros || na.poles + nb.poles != n.poles) continue;
    search(d, a, na, depth + 1, opts, out);
    search(d, b, nb, depth + 1, opts, out);
    return;
  }
  std::ostringstream os;
  os << "bisection lost roots in [" << c.r.re_min << ", " << c.r.re_max << "] x ["
     << c.r.im_min << ", " << c.r.im_max << "]: expected " << n.zeros
     << " zeros and " << n.poles << " poles";
  throw Error(ErrorCode::missed_roots, os.str());
}

// Branch points whose cuts cross the strip re_min < Re < re_max above im_min,
// sorted by Re and with coincident abscissae merged.
std::vector<cplx> interior_branch_points(const Channel& ch, double re_min,
                                         double re_max, double im_min) {
  std::vector<cplx> out;
  for (const auto& b : ch.branch_points()) {
    const double tol = 1e-9 * (1.0 + std::abs(b));
    if (b.real() > re_min + tol && b.real() < re_max - tol && b.imag() >= im_min) {
      out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end(),
            [](cplx a, cplx b) { return a.real() < b.real(); });
  std::vector<cplx> merged;
  for (const auto& b : out) {
    if (merged.empty() ||
        b.real() - merged.back().real() > 1e-9 * (1.0 + std::abs(b))) {
      merged.push_back(b);
    }
  }
  return merged;
}

std::vector<Cell> strip_cells(const Rect& r, const std::vector<cplx>& branch) {
  std::vector<double> s = {r.re_min};
  for (const auto& b : branch) s.push_back(b.real());
  s.push_back(r.re_max);
  std::vector<Cell> cells;
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    cells.push_back({{s[j], s[j + 1], r.im_min, r.im_max}, Sheet::strip(s[j], s[j + 1])});
  }
  return cells;
}

ModeSet locate(const Dispersion& d, const CavityConfig& cfg,
               const TransverseMode& mode, const Rect& region,
               const ModeSearchOptions& opts, Rect& searched) {
  if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max) ||
      !(region.im_min < 0.0) || region.re_min < 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "region must be a proper rectangle with Re >= 0 reaching below "
                "the real axis");
  }
  validate(cfg);
  searched = region;
  if (searched.im_max >= 0.0) searched.im_max = std::max(searched.im_max, opts.eta);

  const auto branch = interior_branch_points(d.channel(), searched.re_min,
                                             searched.re_max, searched.im_min);
  for (const auto& b : d.channel().branch_points()) {
    const bool inside = b.real() >= searched.re_min && b.real() <= searched.re_max &&
                        b.imag() >= searched.im_min && b.imag() <= searched.im_max;
    if (inside && std::abs(d.D(b, {})) < 1e-8) {
      throw Error(ErrorCode::invalid_argument,
                  "region contains a branch point where D vanishes");
    }
  }

  Found found;
  ModeSet out;
  out.mode = mode;
  out.region = region;
  std::vector<std::string> problems;
  for (const auto& cell : strip_cells(searched, branch)) {
    const Counts n = count(d, cell);
    out.winding += n.zeros - 2 * n.poles;
    out.zero_count += n.zeros;
    Found local;
    try {
      search(d, cell, n, 0, opts, local);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::missed_roots) throw;
      problems.push_back(e.what());
      continue;
    }
    int z = 0, p = 0;
    for (const auto& [w, m] : local.zeros) z += m;
    for (const auto& [w, m] : local.poles) p += m;
    if (z != n.zeros || p != 2 * n.poles) {
      std::ostringstream os;
      os << "cell [" << cell.r.re_min << ", " << cell.r.re_max << "]: winding "
         << n.zeros << " zeros, found " << z;
      problems.push_back(os.str());
    }
    for (const auto& zm : local.zeros) found.zeros.push_back(zm);
    for (const auto& pm : local.poles) found.poles.push_back(pm);
  }
  if (!problems.empty()) {
    std::string msg = "argument principle and located roots disagree:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error(ErrorCode::missed_roots, msg);
  }

  auto by_re = [](const std::pair<cplx, int>& a, const std::pair<cplx, int>& b) {
    return a.first.real() < b.first.real();
  };
  std::sort(found.zeros.begin(), found.zeros.end(), by_re);
  std::sort(found.poles.begin(), found.poles.end(), by_re);
  for (const auto& [w, m] : found.zeros) {
    bool dup = false;
    for (const auto& z : out.zeros) {
      if (std::abs(z - w) <= opts.dedup * std::max(1.0, std::abs(w))) dup = true;
    }
    if (dup) continue;
    out.zeros.push_back(w);
    out.multiplicity.push_back(m);
    const auto p = d.channel().at(w, {}, false);
    out.residual.push_back(std::abs(p.D));
  }
  for (const auto& [w, m] : found.poles) {
    out.poles.push_back(w);
    out.pole_order.push_back(m);
  }
  return out;
}

}  // namespace

ModeSet find_modes(const CavityConfig& cfg, const TransverseMode& mode,
                   const Rect& region, int max_count,
                   const ModeSearchOptions& opts) {
  if (max_count < 0) throw Error(ErrorCode::invalid_argument, "max_count < 0");
  const Dispersion d(cfg, mode, opts.tau);
  Rect searched;
  ModeSet out = locate(d, cfg, mode, region, opts, searched);
  if (static_cast<int>(out.zeros.size()) > max_count) {
    out.zeros.resize(max_count);
    out.multiplicity.resize(max_count);
    out.residual.resize(max_count);
  }
  return out;
}

Contour rectangle_contour(const Rect& r, const Sheet& sheet) {
  Contour c;
  for (const auto& p : rect_path(r)) c.pieces.push_back({p, sheet});
  return c;
}

namespace {

cplx boundary_integral(const Dispersion& d, const Contour& contour,
                       const Kernel& f, Tolerance tol) {
  cplx sum = 0.0;
  for (const auto& piece : contour.pieces) {
    // Sample |D| along the piece to detect a zero on the contour.
    for (int j = 1; j < 64; ++j) {
      const cplx z = path_point(piece.path, j / 64.0);
      if (std::abs(d.D(z, piece.sheet)) < 1e-10 * d.scale(z, piece.sheet)) {
        throw Error(ErrorCode::contour_degenerate, "contour passes through a zero of D");
      }
    }
    try {
      sum += trimmed_integral(d, f, piece, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::tolerance_not_met) throw;
      const cplx a = path_start(piece.path), b = path_end(piece.path);
      std::ostringstream os;
      os << "contour integral did not converge on the piece from " << a.real()
         << (a.imag() < 0 ? "" : "+") << a.imag() << "i to " << b.real()
         << (b.imag() < 0 ? "" : "+") << b.imag()
         << "i; the contour passes too close to a zero or pole of D";
      throw Error(ErrorCode::contour_degenerate, os.str(), e.achieved());
    }
  }
  return sum / (2.0 * pi * I);
}

}  // namespace

cplx residue_sum(const CavityConfig& cfg, const TransverseMode& mode,
                 const Contour& contour, const Kernel& f, double tau,
                 Tolerance tol) {
  validate(cfg);
  if (contour.pieces.empty()) throw Error(ErrorCode::invalid_argument, "empty contour");
  const Dispersion d(cfg, mode, tau);
  return boundary_integral(d, contour, f, tol);
}

double sum_rule_residual(const CavityConfig& cfg, const TransverseMode& mode,
                         double omega_max, double tau) {
  validate(cfg);
  if (!(omega_max > 0.0)) throw Error(ErrorCode::invalid_argument, "omega_max must be positive");
  const Dispersion d(cfg, mode, tau);
  // Points where D vanishes exactly (the light line) carry no weight.
  auto integrand = [&](cplx w) -> cplx {
    const double v = w.real() * d.dlnD(cplx(w.real(), 0.0), {}).imag();
    return std::isfinite(v) ? v : 0.0;
  };
  // Split at the real branch points, where ln D' has square-root or
  // logarithmic endpoint behaviour. The delta contributions at +-k and at
  // real zeros cancel pairwise by parity and are not included.
  std::vector<double> pts = {0.0, omega_max};
  for (const auto& b : d.channel().branch_points()) {
    if (std::abs(b.imag()) < 1e-12 * (1.0 + std::abs(b)) && b.real() > 0.0 &&
        b.real() < omega_max) {
      pts.push_back(b.real());
    }
  }
  std::sort(pts.begin(), pts.end());
  // Within delta of a branch point D = 1 - X loses its relative accuracy,
  // so the last stretch uses the c |w - b|^{-1/2} endpoint form instead.
  auto half = [&](double sign) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      const bool lo_sing = j > 0, hi_sing = j + 2 < pts.size();
      const double dlo = lo_sing ? 1e-10 * pts[j] : 0.0;
      const double dhi = hi_sing ? 1e-10 * pts[j + 1] : 0.0;
      const double a = sign * (pts[j] + dlo), b = sign * (pts[j + 1] - dhi);
      Segment seg{a, b, lo_sing, hi_sing};
      if (sign < 0.0) seg = {b, a, hi_sing, lo_sing};
      s += integrate_path(integrand, seg, {1e-9, 1e-11}, 20000).value.real();
      if (lo_sing) s += 2.0 * dlo * integrand(cplx(a, 0.0)).real();
      if (hi_sing) s += 2.0 * dhi * integrand(cplx(b, 0.0)).real();
    }
    return s;
  };
  // Decay test at the upper end of the range.
  double tail = 0.0;
  for (int j = 0; j < 8; ++j) {
    tail += std::abs(integrand(cplx(omega_max * (0.95 + 0.05 * j / 7.0), 0.0)));
  }
  tail /= 8.0;
  if (tail * omega_max > 1.0) {
    throw Error(ErrorCode::tail_not_converged,
                "sum-rule integrand has not decayed at omega_max", tail * omega_max);
  }
  return half(1.0) + half(-1.0);
}

cplx kernel_T0(cplx z, double Lambda) {
  return z - (2.0 * I * z / pi) * std::log(z / Lambda);
}

cplx kernel_finite_T(cplx z, double tau, double Lambda) {
  const cplx w = I * z / tau;
  return z * coth(pi * z / tau) -
         (I * z / pi) * (digamma(1.0 + w) + digamma(1.0 - w) + 2.0 * std::log(tau / Lambda));
}

namespace {

struct Layout {
  double xv, X, Y, h;
};

// Region G = [0, X] x [0, Y] united with [xv, X] x [-Y, 0], cut by vertical
// slits below the branch points inside the lower strip. The contour skips the
// imaginary axis piece iY -> 0 and replaces the real segment [0, xv] by a
// detour through the upper half plane.
Contour energy_contour(const Layout& g, const std::vector<cplx>& branch) {
  const auto cells = strip_cells({g.xv, g.X, -g.Y, 0.0}, branch);
  Contour c;
  const Sheet up{};
  c.pieces.push_back({Segment{0.0, cplx(g.xv, g.h)}, up});
  c.pieces.push_back({Segment{cplx(g.xv, g.h), g.xv}, up});
  c.pieces.push_back({Segment{g.xv, cplx(g.xv, -g.Y)}, cells.front().sheet});
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const auto& cell = cells[j];
    c.pieces.push_back({Segment{cplx(cell.r.re_min, -g.Y), cplx(cell.r.re_max, -g.Y)},
                        cell.sheet});
    if (j + 1 < cells.size()) {
      const cplx b = branch[j];
      const cplx foot(b.real(), -g.Y);
      c.pieces.push_back({Segment{foot, b, false, true}, cell.sheet});
      c.pieces.push_back({Segment{b, foot, true, false}, cells[j + 1].sheet});
    }
  }
  c.pieces.push_back({Segment{cplx(g.X, -g.Y), cplx(g.X, g.Y)}, cells.back().sheet});
  c.pieces.push_back({Segment{cplx(g.X, g.Y), cplx(0.0, g.Y)}, up});
  return c;
}

// Distance from z to the outer edges of the lower strip.
double edge_distance(cplx z, const Layout& g) {
  double d = std::abs(z.real() - g.xv);
  d = std::min(d, std::abs(z.real() - g.X));
  d = std::min(d, std::abs(z.imag() + g.Y));
  return d;
}

PoleSumResult pole_sum_once(const CavityConfig& cfg, const TransverseMode& mode,
                            double tau, Layout g, const Kernel& K) {
  const Dispersion d(cfg, mode, tau);
  ModeSearchOptions opts;
  opts.tau = tau;
  const double margin = 0.02 / cfg.L;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Rect searched;
    ModeSet modes;
    try {
      modes = locate(d, cfg, mode, {g.xv, g.X, -g.Y, 0.0}, opts, searched);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::winding_ambiguous) throw;
      g.xv += 0.0371 / cfg.L;
      g.X += 0.0517 / cfg.L;
      continue;
    }
    bool clear = true;
    for (const auto& z : modes.zeros) clear = clear && edge_distance(z, g) > margin;
    for (const auto& p : modes.poles) clear = clear && edge_distance(p, g) > margin;
    if (!clear) {
      g.xv += 0.0371 / cfg.L;
      g.X += 0.0517 / cfg.L;
      continue;
    }
    PoleSumResult out;
    for (std::size_t j = 0; j < modes.zeros.size(); ++j) {
      out.zero_sum += static_cast<double>(modes.multiplicity[j]) * K(modes.zeros[j]);
    }
    for (std::size_t j = 0; j < modes.poles.size(); ++j) {
      out.pole_sum += static_cast<double>(modes.pole_order[j]) * K(modes.poles[j]);
    }
    const auto branch = interior_branch_points(d.channel(), g.xv, g.X, -g.Y);
    out.boundary = boundary_integral(d, energy_contour(g, branch), K, {1e-10, 1e-12});
    out.value = (out.zero_sum - out.pole_sum - out.boundary).real();
    out.X = g.X;
    out.Y = g.Y;
    out.modes = std::move(modes);
    return out;
  }
  throw Error(ErrorCode::contour_degenerate,
              "could not place the contour away from the zeros of D");
}

Layout default_layout(const CavityConfig& cfg, const TransverseMode& mode,
                      double tau, const GrowthSchedule& s) {
  const double L = cfg.L;
  Layout g{};
  g.xv = mode.k + 0.25 / L;
  double X = std::max(20.0 / L, g.xv + 10.0 / L);
  const ChannelOptics optics(cfg.model, mode, tau);
  for (const auto& b : optics.branch_points()) X = std::max(X, 2.0 * b.real());
  g.X = s.X0 > 0.0 ? s.X0 : X;
  g.Y = s.Y0 > 0.0 ? s.Y0 : 12.0 / L;
  g.h = 0.5 * g.xv;
  if (!(g.X > g.xv)) {
    throw Error(ErrorCode::invalid_argument, "X0 must exceed k + 0.25/L");
  }
  return g;
}

PoleSumResult grow(const std::function<PoleSumResult(int)>& step,
                   const GrowthSchedule& s) {
  if (s.steps < 2 || !(s.factor > 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "growth schedule needs at least two steps and factor > 1");
  }
  PoleSumResult prev = step(0);
  for (int j = 1; j < s.steps; ++j) {
    PoleSumResult cur = step(j);
    cur.change = std::abs(cur.value - prev.value);
    cur.regions = j + 1;
    if (cur.change <= s.rel_tol * std::abs(cur.value) + 1e-13) return cur;
    prev = std::move(cur);
  }
  std::ostringstream os;
  os << "pole sum did not settle; last two partial values differ by "
     << prev.change << " (last value " << format_double(prev.value) << ")";
  throw Error(ErrorCode::sum_not_converged, os.str(), prev.change);
}

}  // namespace

PoleSumResult pole_sum_energy_T0(const CavityConfig& cfg,
                                 const TransverseMode& mode, double Lambda,
                                 const GrowthSchedule& schedule) {
  validate(cfg);
  if (!(Lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "Lambda must be positive");
  const Layout base = default_layout(cfg, mode, 0.0, schedule);
  const Kernel K = [Lambda](cplx z) { return kernel_T0(z, Lambda); };
  return grow(
      [&](int j) {
        Layout g = base;
        g.X = base.X * std::pow(schedule.factor, j);
        g.Y = base.Y * std::pow(schedule.factor, j);
        return pole_sum_once(cfg, mode, 0.0, g, K);
      },
      schedule);
}

PoleSumResult pole_sum_energy_finiteT(const CavityConfig& cfg,
                                      const TransverseMode& mode, double tau,
                                      int n_max, double Lambda,
                                      const GrowthSchedule& schedule) {
  validate(cfg);
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  if (!(Lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "Lambda must be positive");
  const Layout base = default_layout(cfg, mode, tau, schedule);
  const int n0 = n_max > 0 ? n_max
                           : static_cast<int>(std::ceil(base.Y / tau));
  const Kernel K = [tau, Lambda](cplx z) { return kernel_finite_T(z, tau, Lambda); };
  return grow(
      [&](int j) {
        Layout g = base;
        g.X = base.X * std::pow(schedule.factor, j);
        const int n = static_cast<int>(std::ceil(n0 * std::pow(schedule.factor, j)));
        // Midway between Matsubara poles of K_T on the imaginary axis.
        g.Y = (n + 0.5) * tau;
        return pole_sum_once(cfg, mode, tau, g, K);
      },
      schedule);
}

std::string modes_csv(const ModeSet& modes) {
  std::ostringstream os;
  os << "m,re_omega,im_omega,residual\n";
  for (std::size_t j = 0; j < modes.zeros.size(); ++j) {
    os << j + 1 << ',' << format_double(modes.zeros[j].real()) << ','
       << format_double(modes.zeros[j].imag()) << ','
       << format_double(modes.residual[j]) << '\n';
  }
  return os.str();
}

}  // namespace casimir
