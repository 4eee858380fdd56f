import math
from fractions import Fraction

import pytest

import casimir as cs

DRUDE = cs.CavityConfig(cs.Drude(omega_p=9.0, gamma0=0.035), L=1.0)


def test_ideal_mirror_energy():
    value, error = cs.energy_integral_T0(cs.CavityConfig(cs.PerfectMirror(), 1.0))
    assert value == pytest.approx(-math.pi**2 / 720, rel=1e-9)
    assert error < 1e-9


def test_bernoulli_is_exact():
    assert cs.bernoulli(12) == Fraction(-691, 2730)


def test_constant_r_modes():
    cfg = cs.CavityConfig(cs.ConstantR(rho=0.5), 1.0)
    modes = cs.find_modes(cfg, cs.TransverseMode(cs.Polarization.TE, 0.0),
                          cs.Rect(1.0, 32.0, -2.0, 0.0), 10)
    assert len(modes.zeros) == 10
    for m, w in enumerate(modes.zeros, start=1):
        assert abs(w - complex(m * math.pi, math.log(0.5))) < 1e-10
    assert modes.csv().startswith("m,re_omega,im_omega,residual\n")


def test_residue_sum_takes_python_kernels():
    cfg = cs.CavityConfig(cs.ConstantR(rho=0.5), 1.0)
    mode = cs.TransverseMode(cs.Polarization.TE, 0.0)
    box = cs.Rect(2.0, 4.0, -1.5, 0.5)
    assert cs.residue_sum(cfg, mode, box, lambda z: 1.0) == pytest.approx(1.0, abs=1e-8)
    w1 = complex(math.pi, math.log(0.5))
    assert cs.residue_sum(cfg, mode, box, lambda z: z) == pytest.approx(w1, rel=1e-10)


def test_pole_sum_matches_imaginary_axis():
    mode = cs.TransverseMode(cs.Polarization.TM, 1.0)
    ref = cs.channel_energy_T0(DRUDE, mode)
    assert cs.pole_sum_energy_T0(DRUDE, mode) == pytest.approx(ref, rel=1e-6)


def test_sum_rule_small():
    mode = cs.TransverseMode(cs.Polarization.TE, 1.0)
    assert abs(cs.sum_rule_residual(DRUDE, mode, 200.0)) < 1e-6


def test_residual_entropy_negative():
    cfg = cs.CavityConfig(cs.DrudeThermal(omega_p=9.0, gamma0=0.0, alpha2=1.0), 1.0)
    verdict = cs.residual_entropy(cfg)
    assert verdict["classification"] == "finite-negative"
    assert verdict["discontinuity"]
    assert verdict["residual"] == pytest.approx(-0.0160289953552, rel=1e-8)


def test_errors_carry_codes():
    with pytest.raises(cs.CasimirError) as info:
        cs.free_energy(cs.CavityConfig(cs.Drude(omega_p=-1.0, gamma0=0.0), 1.0), 0.1)
    assert info.value.code == "invalid-argument"
