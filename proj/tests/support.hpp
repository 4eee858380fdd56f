#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "casimir/spectral.hpp"

namespace casimir::test {

// Frozen reference values; the scripts under tests/oracles regenerate them.
namespace oracle {
// spectral_oracle.py
inline constexpr double g_drude_te_k1_xi1 = -0.031766680291829238995;
inline constexpr double g_drude_tm_k1_xi1 = -0.043850821068898952771;
struct XiDerivative {
  double xi, value;
};
inline constexpr XiDerivative const_r_slope[] = {
    {0.3, 0.018374374781167995128},
    {0.7, 0.025514219151535131411},
    {2.5, 0.002130549584018120468},
};
struct ComplexDerivative {
  double re, im, d_re, d_im;
};
inline constexpr ComplexDerivative const_r_dlnD[] = {
    {0.4, 0.9, 0.0091212290519817971736, -0.025361074336005805246},
    {2.2, 0.35, -0.14722788971435320369, 0.18230168152179782368},
    {-1.3, 1.7, -0.0085643592814346078921, 0.0068508006784443861321},
    {3.1, 2.4, -0.0010980319735233215582, -0.0033632589597455468766},
    {0.05, 0.6, -0.00021330638432291367286, -0.025730166272259285278},
};
// lifshitz_oracle.py
inline constexpr double free_energy_drude_tau05 = -0.008189709763003268;
inline constexpr double ideal_energy = -0.013707783890401886971;
inline constexpr double ideal_force = -0.041123351671205660912;
// entropy_oracle.py
inline constexpr double residual_entropy_drude_thermal = -0.016028995355221581748;
// numerics_oracle.py
inline constexpr double int_u2_log = -0.27058080842778454788;
inline constexpr double int_u_log = -0.30051422578989857135;
inline constexpr double bernoulli_30 = 601580873.9006423683843039;
}  // namespace oracle

inline const DielectricModel kDrude = Drude{9.0, 0.035};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx complex_in(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }
  Polarization polarization() { return integer(0, 1) ? Polarization::TM : Polarization::TE; }

  DielectricModel model() {
    switch (integer(0, 4)) {
      case 0: return PerfectMirror{};
      case 1: return ConstantR{uniform(0.0, 0.95)};
      case 2: return Plasma{uniform(0.5, 12.0)};
      case 3: return Drude{uniform(0.5, 12.0), uniform(0.001, 2.0)};
      default: return DrudeThermal{uniform(0.5, 12.0), uniform(0.0, 1.0), uniform(0.0, 2.0)};
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace casimir::test
