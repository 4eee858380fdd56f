"""g values on the imaginary axis and d ln D / dw for the constant-r model."""
from mpmath import mp, mpf, mpc, sqrt, exp, log, diff, pi
from common import g_drude

mp.dps = 40

for pol in ("TE", "TM"):
    print(f"g drude(9,0.035) {pol} k=1 xi=1 L=1:",
          mp.nstr(g_drude(mpf(1), 1, pol, 9, mpf("0.035")), 20))

rho = mpf("0.5")


def g_const(xi, k=1, L=1):
    return log(1 - rho**2 * exp(-2 * sqrt(k**2 + xi**2) * L))


for xi in ("0.3", "0.7", "2.5"):
    print(f"d/dxi ln(1-rho^2 e^-2kappa) rho=0.5 k=1 xi={xi}:",
          mp.nstr(diff(g_const, mpf(xi)), 20))


def lnD(w, k=1, L=1):
    kap = sqrt(k**2 - w**2)  # principal sqrt: Re kappa >= 0
    return log(1 - rho**2 * exp(-2 * kap * L))


points = [mpc("0.4", "0.9"), mpc("2.2", "0.35"), mpc("-1.3", "1.7"),
          mpc("3.1", "2.4"), mpc("0.05", "0.6")]
for w in points:
    d = diff(lnD, w)
    print(f"dlnD/dw rho=0.5 k=1 L=1 w={mp.nstr(w, 4)}:", mp.nstr(d.real, 20), mp.nstr(d.imag, 20))

w1 = pi + 1j * log(rho)
print("D(pi + i ln 0.5), k=0:", mp.nstr(abs(1 - rho**2 * exp(2j * w1)), 5))
