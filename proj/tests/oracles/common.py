"""Closed-form channel optics in arbitrary precision, written independently of
the C++ sources. Imaginary frequencies only: w = i xi, xi > 0."""
from mpmath import mp, mpf, sqrt, exp, log


def eps_drude(xi, omega_p, gamma):
    return 1 + omega_p**2 / (xi * (xi + gamma))


def r_squared(xi, k, pol, omega_p, gamma):
    kap = sqrt(k**2 + xi**2)
    eps = eps_drude(xi, omega_p, gamma)
    kt = sqrt(k**2 + eps * xi**2)
    if pol == "TE":
        r = (kap - kt) / (kap + kt)
    else:
        r = (eps * kap - kt) / (eps * kap + kt)
    return r**2


def g_drude(xi, k, pol, omega_p, gamma, L=1):
    kap = sqrt(k**2 + xi**2)
    return log(1 - r_squared(xi, k, pol, omega_p, gamma) * exp(-2 * kap * L))


def r_plasma_te_static(k, omega_p):
    kt = sqrt(k**2 + omega_p**2)
    return (k - kt) / (k + kt)
