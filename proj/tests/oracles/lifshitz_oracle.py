"""Free energy per area of Drude(9, 0.035), L = 1, tau = 0.5 and the ideal
mirror constants."""
from mpmath import mp, mpf, quad, exp, log, sqrt, pi, inf, nsum
from common import g_drude

mp.dps = 20
omega_p, gamma, L, tau = 9, mpf("0.035"), 1, mpf("0.5")


def k_integral(xi, pol):
    # k dk with u = sqrt(k^2 + xi^2): k dk = u du.
    f = lambda u: u * g_drude(xi, sqrt(u**2 - xi**2), pol, omega_p, gamma, L)
    return quad(f, [xi, xi + 1, xi + 5, xi + 20, inf])


# n = 0: r_TM -> 1, r_TE -> 0 for damped Drude.
total = quad(lambda k: k * log(1 - exp(-2 * k * L)), [0, 1, 5, inf]) / 2
n = 1
while True:
    term = k_integral(n * tau, "TE") + k_integral(n * tau, "TM")
    total += term
    if abs(term) < mpf(10) ** -22:
        break
    n += 1
F = tau * total / (4 * pi**2)
print("F/A drude(9,0.035) L=1 tau=0.5:", mp.nstr(F, 16), "terms", n)
print("-pi^2/720:", mp.nstr(-pi**2 / 720, 20))
print("-pi^2/240:", mp.nstr(-pi**2 / 240, 20))
