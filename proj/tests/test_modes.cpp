#include <doctest.h>

#include "casimir/lifshitz.hpp"
#include "casimir/modes.hpp"
#include "support.hpp"

using namespace casimir;
using casimir::test::rel_diff;

namespace {
const CavityConfig kHalf{1.0, ConstantR{0.5}};
const CavityConfig kDrudeCfg{1.0, test::kDrude};
const TransverseMode kFlat{Polarization::TE, 0.0};
const cplx kW1(pi, -0.69314718055994531);
const Rect kAroundW1{2.5, 3.8, -1.2, -0.2};
}  // namespace

TEST_CASE("perfect mirror standing waves") {
  const auto ms = find_modes(CavityConfig{1.0, PerfectMirror{}}, {Polarization::TM, 0.0},
                             Rect{0.5, 10.0, -1.0, 0.0}, 10);
  REQUIRE(ms.zeros.size() == 3);
  for (int m = 0; m < 3; ++m) CHECK(std::abs(ms.zeros[m] - cplx((m + 1) * pi, 0)) < 1e-12);
}

TEST_CASE("constant-r zeros in closed form") {
  const auto ms = find_modes(kHalf, kFlat, Rect{0.5, 20.0, -2.0, 0.0}, 50);
  REQUIRE(ms.zeros.size() == 6);
  CHECK(ms.winding == 6);
  CHECK(ms.zero_count == 6);
  for (int m = 0; m < 6; ++m) {
    CHECK(std::abs(ms.zeros[m] - cplx((m + 1) * pi, std::log(0.5))) < 1e-12);
    CHECK(ms.multiplicity[m] == 1);
    CHECK(ms.residual[m] < 1e-11);
  }
  // Truncation keeps the winding of the full region.
  const auto few = find_modes(kHalf, kFlat, Rect{0.5, 20.0, -2.0, 0.0}, 2);
  CHECK(few.zeros.size() == 2);
  CHECK(few.winding == 6);
}

TEST_CASE("drude zeros are causal and paired") {
  for (auto p : {Polarization::TE, Polarization::TM}) {
    const TransverseMode mode{p, 1.0};
    const auto ms = find_modes(kDrudeCfg, mode, Rect{1.05, 25.0, -4.0, 0.0}, 100);
    CAPTURE(to_string(p));
    CHECK(ms.zeros.size() >= 6);
    for (std::size_t m = 0; m < ms.zeros.size(); ++m) {
      const cplx w = ms.zeros[m];
      CHECK(w.imag() < 0.0);
      const double scale = 1.0 + std::abs(dispersion(kDrudeCfg, mode, w) - 1.0);
      CHECK(std::abs(dispersion(kDrudeCfg, mode, -std::conj(w))) < 1e-10 * scale);
      if (m > 0) CHECK(ms.zeros[m].real() >= ms.zeros[m - 1].real());
    }
    // TE has no reflection poles.
    if (p == Polarization::TE) CHECK(ms.poles.empty());
  }
}

TEST_CASE("damping sweep moves a zero continuously toward the real axis") {
  const TransverseMode mode{Polarization::TE, 1.0};
  double previous = 0.0;
  cplx last(0, 0);
  for (double gamma : {0.0, 0.005, 0.01, 0.02, 0.04, 0.08}) {
    const CavityConfig cfg{1.0, Drude{9.0, gamma}};
    const auto ms = find_modes(cfg, mode, Rect{2.0, 3.5, -1.0, 0.0}, 5);
    REQUIRE(ms.zeros.size() == 1);
    const cplx w = ms.zeros[0];
    CAPTURE(gamma);
    if (gamma == 0.0) {
      CHECK(w.imag() == 0.0);
    } else {
      CHECK(w.imag() < 0.0);
      CHECK(std::abs(w.imag()) > previous);
      CHECK(std::abs(w - last) < 0.05);
    }
    previous = std::abs(w.imag());
    last = w;
  }
}

TEST_CASE("residue sums around the first constant-r zero") {
  const auto c = rectangle_contour(kAroundW1);
  const cplx count = residue_sum(kHalf, kFlat, c, [](cplx) { return cplx(1.0); });
  CHECK(std::abs(count - 1.0) < 1e-8);
  const cplx first = residue_sum(kHalf, kFlat, c, [](cplx z) { return z; });
  CHECK(std::abs(first - kW1) < 1e-10);
  const double Lambda = 2.0;
  const cplx logk =
      residue_sum(kHalf, kFlat, c, [=](cplx z) { return z * std::log(z / Lambda); });
  CHECK(std::abs(logk - kW1 * std::log(kW1 / Lambda)) < 1e-10);
  // Term-by-term: the finite-temperature kernel at the closed-form zero.
  for (double tau : {0.3, 1.0, 4.0}) {
    const cplx kt = residue_sum(kHalf, kFlat, c, [=](cplx z) { return kernel_finite_T(z, tau, 1.0); });
    CHECK(std::abs(kt - kernel_finite_T(kW1, tau, 1.0)) < 1e-9 * std::abs(kt));
  }
}

TEST_CASE("a contour through a zero is degenerate") {
  const Rect through{2.5, 3.8, kW1.imag(), 0.5};
  try {
    residue_sum(kHalf, kFlat, rectangle_contour(through), [](cplx) { return cplx(1.0); });
    FAIL("expected contour-degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::contour_degenerate);
  }
}

TEST_CASE("kernels") {
  // K_T -> K as tau -> 0, and Re K_T(w) = w (2 nbar + 1) on the real axis.
  const cplx z(3.0, -1.2);
  CHECK(std::abs(kernel_finite_T(z, 1e-3, 1.0) - kernel_T0(z, 1.0)) < 1e-6);
  for (double w : {0.7, 2.0, 5.0}) {
    const double tau = 3.0;
    const double nbar = 1.0 / std::expm1(2 * pi * w / tau);
    CHECK(kernel_finite_T(w, tau, 1.0).real() == doctest::Approx(w * (2 * nbar + 1)).epsilon(1e-13));
    CHECK(kernel_T0(w, 1.0).real() == doctest::Approx(w).epsilon(1e-15));
  }
}

TEST_CASE("sum rule") {
  CHECK(sum_rule_residual(CavityConfig{1.0, ConstantR{0.0}}, {Polarization::TE, 1.0}, 50.0) == 0.0);
  for (auto p : {Polarization::TE, Polarization::TM}) {
    CHECK(std::abs(sum_rule_residual(kDrudeCfg, {p, 1.0}, 200.0)) < 1e-6);
  }
  try {
    sum_rule_residual(kDrudeCfg, {Polarization::TM, 1.0}, 3.0);
    FAIL("expected tail-not-converged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::tail_not_converged);
  }
}

TEST_CASE("pole sums reproduce the integral representations") {
  const std::vector<CavityConfig> models = {CavityConfig{1.0, PerfectMirror{}}, kHalf,
                                            CavityConfig{1.0, Plasma{9.0}}, kDrudeCfg};
  for (const auto& cfg : models) {
    for (auto p : {Polarization::TE, Polarization::TM}) {
      const TransverseMode mode{p, 1.0};
      CAPTURE(model_name(cfg.model));
      CAPTURE(to_string(p));
      const auto t0 = pole_sum_energy_T0(cfg, mode, 1.0);
      CHECK(rel_diff(t0.value, channel_energy_T0(cfg, mode)) < 1e-6);
      CHECK(t0.regions >= 2);
      const auto t = pole_sum_energy_finiteT(cfg, mode, 0.5);
      CHECK(rel_diff(t.value, channel_matsubara_energy(cfg, mode, 0.5).value) < 1e-6);
    }
  }
}

TEST_CASE("finite-temperature pole sum tends to the T = 0 sum") {
  const TransverseMode mode{Polarization::TE, 1.0};
  const double t0 = pole_sum_energy_T0(kDrudeCfg, mode, 1.0).value;
  double previous = std::numeric_limits<double>::infinity();
  for (double tau : {0.4, 0.2, 0.1}) {
    const double d = std::abs(pole_sum_energy_finiteT(kDrudeCfg, mode, tau).value - t0);
    CHECK(d < previous);
    previous = d;
  }
  CHECK(previous < 2e-2 * std::abs(t0));
}

TEST_CASE("cutoff shift is bounded by the sum rule") {
  for (auto p : {Polarization::TE, Polarization::TM}) {
    const TransverseMode mode{p, 1.0};
    const double s = sum_rule_residual(kDrudeCfg, mode, 200.0);
    const double a = pole_sum_energy_T0(kDrudeCfg, mode, 0.5).value;
    const double b = pole_sum_energy_T0(kDrudeCfg, mode, 20.0).value;
    CHECK(std::abs(a - b) <= 2 / pi * std::log(40.0) * std::abs(s) + 1e-9);
  }
}

TEST_CASE("invalid regions and exhausted growth") {
  CHECK_THROWS_AS(find_modes(kHalf, kFlat, Rect{2.0, 1.0, -1.0, 0.0}, 5), Error);
  CHECK_THROWS_AS(pole_sum_energy_T0(kDrudeCfg, {Polarization::TE, 1.0}, -1.0), Error);
  GrowthSchedule tight;
  tight.rel_tol = 1e-17;
  tight.steps = 2;
  try {
    pole_sum_energy_T0(kDrudeCfg, {Polarization::TM, 1.0}, 1.0, tight);
    FAIL("expected sum-not-converged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::sum_not_converged);
  }
}

TEST_CASE("modes csv") {
  const auto ms = find_modes(kHalf, kFlat, kAroundW1, 5);
  const std::string csv = modes_csv(ms);
  CHECK(csv.rfind("m,re_omega,im_omega,residual\n1,3.14159265358979", 0) == 0);
}

TEST_CASE("property: residue identity on random single-sheet boxes") {
  test::Gen gen(31);
  const auto all = find_modes(kHalf, {Polarization::TM, 1.0}, Rect{1.2, 20.0, -2.0, 0.0}, 100);
  for (int trial = 0; trial < 20; ++trial) {
    Rect r{gen.uniform(1.2, 15.0), 0, gen.uniform(-2.0, -0.8), gen.uniform(-0.5, 0.5)};
    r.re_max = r.re_min + gen.uniform(0.5, 5.0);
    bool clear = true;
    for (cplx z : all.zeros) {
      clear &= std::abs(z.real() - r.re_min) > 0.05 && std::abs(z.real() - r.re_max) > 0.05;
    }
    if (!clear) continue;
    cplx direct = 0.0;
    for (cplx z : all.zeros) {
      if (r.contains(z)) direct += z * z;
    }
    const cplx got = residue_sum(kHalf, {Polarization::TM, 1.0}, rectangle_contour(r),
                                 [](cplx z) { return z * z; });
    CHECK(std::abs(got - direct) <= 1e-8 * std::max(1.0, std::abs(direct)));
  }
}
