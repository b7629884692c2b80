"""Independent derivation of the frozen reference values used in the tests.

Uses mpmath / scipy only (no fblsec code paths). Run with
``python3 tests/oracles/derive_frozen.py``; the printed numbers are pasted
into the test modules as constants.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate, optimize, special

mp.mp.dps = 40


def Q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def eps(g, n, R):
    g = mp.mpf(g)
    C = mp.log(1 + g, 2)
    V = (1 - (1 + g) ** -2) * mp.log(mp.e, 2) ** 2
    return Q((C - R) / mp.sqrt(V / n))


def leak_single(Ge, n, R):
    f = lambda g: (1 - eps(g, n, R)) * mp.exp(-g / Ge) / Ge
    k = 2 ** mp.mpf(R) - 1
    return mp.quad(f, [0, k, k * 4, mp.inf])


def re_star(Ge, n, delta):
    return mp.findroot(lambda r: leak_single(Ge, n, r) - delta, (mp.mpf("0.5"), mp.mpf(3)), solver="anderson")


def cond_T(Rs, g, N, Re):
    return Rs * (1 - eps(g, N, Rs + Re))


print("-- specfun")
for x in (-3.0, 0.0, 1.5, 8.0, 30.0):
    print("Q", x, mp.nstr(Q(x), 20))
for x in (-0.3, 0.5, 10.0, 1e6):
    print("W0", x, mp.nstr(mp.lambertw(x), 20))
for m, x in ((1, 0.5), (3, 2.0), (6, 10.0)):
    print("Gbar", m, x, mp.nstr(mp.gammainc(m, x, mp.inf, regularized=True), 20))

print("-- single antenna")
Re = re_star(1, 500, mp.mpf("0.2"))
print("R_e*(Ge=1,n=500,d=0.2)", mp.nstr(Re, 17))
for n in (100, 1000):
    print("R_e*(Ge=1,n=%d,d=0.2)" % n, mp.nstr(re_star(1, n, mp.mpf("0.2")), 17))
g = 10 ** mp.mpf("0.9")
rs = mp.findroot(lambda r: mp.diff(lambda t: cond_T(t, g, 500, Re), r), mp.mpf("1.6"))
print("adaptive eta=9dB R_s*", mp.nstr(rs, 17), "T", mp.nstr(cond_T(rs, g, 500, Re), 17))

# Non-adaptive single: linearized-Q success probability, optimized by scipy.
def TN_direct(Rs, n, Re, Gb):
    theta2 = 2.0 ** (Rs + Re) - 1.0
    th = math.sqrt(theta2)
    beta = math.sqrt(n) / (2 * math.pi)
    hi = theta2 + th / (2 * beta)
    band = integrate.quad(lambda x: (0.5 + beta / th * (x - theta2)) * math.exp(-x / Gb) / Gb, theta2, hi,
                          epsabs=1e-16, epsrel=1e-13)[0]
    return Rs * (band + math.exp(-hi / Gb))


Gb = 10 ** 0.3
Re_f = float(Re)
res = optimize.minimize_scalar(lambda r: -TN_direct(r, 500, Re_f, Gb), bounds=(0.05, 3.0), method="bounded",
                               options={"xatol": 1e-12})
print("nonadaptive Gb=3dB R_s*", repr(res.x), "T", repr(-res.fun), "theta", repr(math.sqrt(2 ** (res.x + Re_f) - 1)))
print("nonadaptive Gb=3dB T(R_s=1)", repr(TN_direct(1.0, 500, Re_f, Gb)))

print("-- multi antenna (M=4, Ge=1, d=0.2, N=500)")
M, d = 4, mp.mpf("0.2")


def rho_e(phi):
    phi = mp.mpf(phi)
    c = (1 - phi) / (M - 1)
    return mp.findroot(lambda r: r + (M - 1) * mp.log(1 + c * r) - mp.log(1 / d), mp.mpf(1))


print("rho_e(0)", mp.nstr(rho_e(0), 17), "rho_e(0.5)", mp.nstr(rho_e(0.5), 17), "rho_e(1)", mp.nstr(rho_e(1), 17))
rb = mp.mpf(10)


def T_ao(phi, Rs, n=500):
    lb = 1 + phi * rb
    le = 1 + phi * rho_e(phi)
    arg = mp.sqrt(n) * lb * (mp.log(lb / le) - Rs * mp.log(2)) / mp.sqrt(lb ** 2 - 1)
    return Rs * (1 - Q(arg))


sol = optimize.minimize(lambda v: -float(T_ao(v[0], v[1])), x0=[0.8, 1.9], method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
print("AO eta=10dB phi*, R_s*", repr(sol.x[0]), repr(sol.x[1]), "T", repr(-sol.fun))

Gb3 = 10 ** 0.3


def T_na(phi, Rs, n=500):
    lam_e = 1 + phi * float(rho_e(phi))
    theta2 = 2.0 ** Rs * lam_e - 1.0
    th = math.sqrt(theta2)
    beta = math.sqrt(n) / (2 * math.pi)
    s = phi * Gb3
    hi = theta2 + th / (2 * beta)
    pdf = lambda x: x ** (M - 1) * math.exp(-x / s) / (math.factorial(M - 1) * s ** M)
    band = integrate.quad(lambda x: (0.5 + beta / th * (x - theta2)) * pdf(x), theta2, hi, epsabs=1e-16,
                          epsrel=1e-13)[0]
    return Rs * (band + special.gammaincc(M, hi / s))


sol = optimize.minimize(lambda v: -T_na(v[0], v[1]), x0=[0.78, 1.35], method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000})
print("NA multi Gb=3dB phi*, R_s*", repr(sol.x[0]), repr(sol.x[1]), "T", repr(-sol.fun))
print("NA multi T(0.5, 1.0)", repr(T_na(0.5, 1.0)))
