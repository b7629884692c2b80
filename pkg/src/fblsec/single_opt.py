"""Secrecy-throughput analysis and optimization, single-antenna transmitter.

Adaptive scheme: Alice knows eta = |h_b|^2 and picks the on-off decision and
the secrecy rate per realization. Non-adaptive scheme: everything is fixed
from channel statistics. In both the blocklength optimum is the maximum N
and the rate redundancy is the smallest value meeting the leakage target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSnapshot, SystemParams
from .errors import DomainError
from .leakage import invert_redundancy
from .specfun import (
    LOG2E,
    TIGHT_TOL,
    Tolerance,
    _q_unchecked,
    capacity,
    decoding_error,
    dispersion,
    expand_bracket_upper,
    find_root,
    integrate,
    lambert_w0,
    normal_pdf,
    q_function,
)

LN2 = math.log(2.0)


@dataclass
class DesignPoint:
    """A transmission design and the throughput it achieves."""

    mu: float
    n: int
    R_s: float
    R_e: float
    throughput: float
    phi: float = 1.0
    alpha: float = 1.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def R_t(self) -> float:
        return self.R_s + self.R_e

    @property
    def transmits(self) -> bool:
        return self.throughput > 0.0


def _require_single(params: SystemParams):
    if params.M != 1:
        raise DomainError(f"single-antenna routines need M = 1, got M = {params.M}")


def p_success(gamma_b, n, R_t):
    """Bob's decoding success probability 1 - eps(gamma_b, n, R_t)."""
    if not n >= 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if np.any(np.asarray(R_t) < 0):
        raise DomainError("R_t must be >= 0")
    g = np.asarray(gamma_b, dtype=float)
    out = np.where(g > 0, 1.0 - decoding_error(g, n, R_t), 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Conditional (fixed eta) problem: maximize R_s * p_s over 0 <= R_s <= C_b - R_e
# ---------------------------------------------------------------------------

def conditional_throughput(R_s, C_b, V_b, R_e, N):
    """R_s [1 - Q((C_b - R_s - R_e) / sqrt(V_b / N))]."""
    R_s = np.asarray(R_s, dtype=float)
    x = (C_b - R_s - R_e) / math.sqrt(V_b / N)
    out = R_s * (1.0 - q_function(x))
    return float(out) if np.ndim(out) == 0 else out


def conditional_throughput_drs(R_s, C_b, V_b, R_e, N):
    """Derivative of :func:`conditional_throughput` in R_s."""
    R_s = np.asarray(R_s, dtype=float)
    s = math.sqrt(V_b / N)
    x = (C_b - R_s - R_e) / s
    out = 1.0 - q_function(x) - R_s * normal_pdf(x) / s
    return float(out) if np.ndim(out) == 0 else out


def conditional_throughput_drs2(R_s, C_b, V_b, R_e, N):
    s = math.sqrt(V_b / N)
    x = (C_b - R_s - R_e) / s
    pdf = normal_pdf(x)
    return -2.0 * pdf / s - R_s * x * pdf / (s * s)


def boundary_snr(R_e: float, N: int) -> float:
    """SNR below which the full rate C_b - R_e is throughput-optimal.

    Root of C(gamma) - sqrt(pi V(gamma) / (2N)) = R_e, searched between the
    minimizer of the left side and exp(sqrt(pi/(2N)) + R_e ln 2) - 1.
    """
    if not R_e >= 0:
        raise DomainError(f"R_e must be >= 0, got {R_e}")
    c = math.pi / (2.0 * N)
    lo = math.sqrt(0.5 + math.sqrt(0.25 + c)) - 1.0
    hi = math.expm1(math.sqrt(c) + R_e * LN2)

    def psi(g):
        return capacity(g) - math.sqrt(c * dispersion(g)) - R_e

    return find_root(psi, (lo, hi), TIGHT_TOL)


def optimal_secrecy_rate(C_b: float, V_b: float, R_e: float, N: int) -> float:
    """Maximizer of the (concave) conditional throughput in R_s."""
    r_max = C_b - R_e
    if r_max <= 0.0:
        return 0.0
    if conditional_throughput_drs(r_max, C_b, V_b, R_e, N) >= 0.0:
        return r_max
    return find_root(
        lambda r: conditional_throughput_drs(r, C_b, V_b, R_e, N),
        (0.0, r_max),
        TIGHT_TOL,
        df=lambda r: conditional_throughput_drs2(r, C_b, V_b, R_e, N),
    )


def optimal_secrecy_rate_array(C_b, V_b, R_e, N, iterations: int = 60) -> np.ndarray:
    """Vectorized :func:`optimal_secrecy_rate` by bracketed bisection."""
    C_b = np.asarray(C_b, dtype=float)
    V_b = np.asarray(V_b, dtype=float)
    r_max = np.maximum(C_b - R_e, 0.0)
    s = np.sqrt(np.maximum(V_b, 1e-300) / N)

    def deriv(r):
        x = (C_b - r - R_e) / s
        return 1.0 - _q_unchecked(x) - r * normal_pdf(x) / s

    lo = np.zeros_like(r_max)
    hi = r_max.copy()
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        pos = deriv(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    interior = 0.5 * (lo + hi)
    at_boundary = deriv(r_max) >= 0
    return np.where(r_max <= 0, 0.0, np.where(at_boundary, r_max, interior))


def rs_lower_bound(params: SystemParams, snapshot: ChannelSnapshot, R_e_star: float, N: int | None = None) -> float:
    """Closed-form lower bound on the optimal adaptive secrecy rate."""
    N = params.N if N is None else N
    g = params.P_b * snapshot.eta
    C_b, V_b = capacity(g), dispersion(g)
    gap = C_b - R_e_star
    if gap <= 0.0:
        return 0.0
    arg = 0.5 + gap / math.sqrt(2.0 * math.pi * V_b / N)
    loss = math.sqrt(2.0 * V_b / N * math.log(arg)) if arg > 1.0 else 0.0
    return max(0.0, gap - loss)


def adaptive_on_off_threshold(params: SystemParams, R_e_star: float) -> float:
    return math.expm1(R_e_star * LN2) / params.P_b


def adaptive_conditional_opt(params: SystemParams, snapshot: ChannelSnapshot, model=None,
                             R_e_star: float | None = None) -> DesignPoint:
    """Optimal adaptive design for one main-channel realization."""
    _require_single(params)
    N = params.N
    if R_e_star is None:
        R_e_star = invert_redundancy(params, 1.0, N, params.delta, model)
    mu = adaptive_on_off_threshold(params, R_e_star)
    eta = snapshot.eta
    if eta <= mu:
        return DesignPoint(mu=mu, n=N, R_s=0.0, R_e=R_e_star, throughput=0.0,
                           diagnostics={"regime": "off"})
    g = params.P_b * eta
    C_b, V_b = capacity(g), dispersion(g)
    g_circ = boundary_snr(R_e_star, N)
    if g <= g_circ or conditional_throughput_drs(C_b - R_e_star, C_b, V_b, R_e_star, N) >= 0:
        R_s, regime = C_b - R_e_star, "boundary"
    else:
        R_s, regime = optimal_secrecy_rate(C_b, V_b, R_e_star, N), "interior"
    resid = conditional_throughput_drs(R_s, C_b, V_b, R_e_star, N)
    T = R_s * p_success(g, N, R_s + R_e_star)
    return DesignPoint(mu=mu, n=N, R_s=R_s, R_e=R_e_star, throughput=T,
                       diagnostics={"regime": regime, "residual": resid, "gamma_b_circ": g_circ})


def adaptive_conditional_throughput_array(params: SystemParams, eta, R_e_star: float) -> np.ndarray:
    """Optimal conditional throughput for an array of eta values."""
    eta = np.asarray(eta, dtype=float)
    g = params.P_b * eta
    N = params.N
    C_b = capacity(g)
    V_b = dispersion(g)
    rs = optimal_secrecy_rate_array(C_b, V_b, R_e_star, N)
    ps = p_success(g, N, rs + R_e_star)
    mu = adaptive_on_off_threshold(params, R_e_star)
    return np.where(eta > mu, rs * ps, 0.0)


def adaptive_expected_throughput(params: SystemParams, model=None, tol: Tolerance | None = None) -> float:
    """Average of the conditional optimum over eta ~ Exp(sigma_b2)."""
    _require_single(params)
    R_e = invert_redundancy(params, 1.0, params.N, params.delta, model)
    tol = tol or Tolerance(abs_tol=1e-11, rel_tol=1e-9, max_iter=60)
    Gb = params.Gamma_b
    g0 = math.expm1(R_e * LN2)

    def integrand(g):
        return adaptive_conditional_throughput_array(params, g / params.P_b, R_e) * np.exp(-g / Gb) / Gb

    g_circ = max(boundary_snr(R_e, params.N), g0)
    return integrate(integrand, g0, g_circ, tol) + integrate(integrand, g_circ, math.inf, tol)


# ---------------------------------------------------------------------------
# Non-adaptive scheme (piecewise-linear Q surrogate)
# ---------------------------------------------------------------------------

def _beta(n):
    return math.sqrt(n) / (2.0 * math.pi)


def _Y(theta, beta, Gamma_b):
    x = theta / (2.0 * beta * Gamma_b)
    return np.where(x > 0, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0)


def nonadaptive_throughput_theta(theta, R_e, n, Gamma_b):
    """Non-adaptive throughput as a function of theta_b = sqrt(2^(R_s+R_e) - 1)."""
    theta = np.asarray(theta, dtype=float)
    beta = _beta(n)
    rate = np.log1p(theta * theta) * LOG2E - R_e
    out = 0.5 * rate * (1.0 + _Y(theta, beta, Gamma_b)) * np.exp(-theta * theta / Gamma_b)
    return float(out) if out.ndim == 0 else out


def nonadaptive_G(theta, R_e, n, Gamma_b):
    """Sign-carrying factor of dT_N/dtheta_b; decreasing in theta_b."""
    theta = np.asarray(theta, dtype=float)
    beta = _beta(n)
    Y = _Y(theta, beta, Gamma_b)
    g = (1.0 / (2 * theta) + 1.0 / (4 * beta * Gamma_b) + theta / Gamma_b) * Y + theta / Gamma_b - 1.0 / (2 * theta)
    rate = np.log1p(theta * theta) * LOG2E - R_e
    out = (1.0 + Y) / LN2 - rate * (1.0 + theta * theta) / theta * g
    return float(out) if out.ndim == 0 else out


def nonadaptive_dT_dtheta(theta, R_e, n, Gamma_b):
    theta = np.asarray(theta, dtype=float)
    out = theta / (1.0 + theta * theta) * np.exp(-theta * theta / Gamma_b) * nonadaptive_G(theta, R_e, n, Gamma_b)
    return float(out) if out.ndim == 0 else out


def nonadaptive_on_off_threshold(params: SystemParams, R_s: float, R_e: float) -> float:
    return math.expm1((R_s + R_e) * LN2) / params.P_b


def nonadaptive_throughput(params: SystemParams, R_s, n=None, model=None, mode: str = "piecewise"):
    """Non-adaptive throughput for secrecy rate ``R_s`` and blocklength ``n``.

    ``mode="piecewise"`` is the closed form built on the linearized Q;
    ``mode="exact"`` integrates the exact normal-approximation success
    probability above the on-off threshold (for cross-checks).
    """
    _require_single(params)
    n = params.N if n is None else n
    if not 1 <= n:
        raise DomainError(f"n must be >= 1, got {n}")
    R_e = invert_redundancy(params, 1.0, n, params.delta, model)
    R_s_arr = np.asarray(R_s, dtype=float)
    if np.any(R_s_arr < 0):
        raise DomainError("R_s must be >= 0")
    theta = np.sqrt(np.expm1((R_s_arr + R_e) * LN2))
    if mode == "piecewise":
        return nonadaptive_throughput_theta(theta, R_e, n, params.Gamma_b)
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    Gb = params.Gamma_b

    def one(rs):
        if rs == 0.0:
            return 0.0
        lo = math.expm1((rs + R_e) * LN2)
        ps = integrate(lambda g: p_success(g, n, rs + R_e) * np.exp(-g / Gb) / Gb, lo, math.inf,
                       Tolerance(1e-13, 1e-10, 60))
        return rs * ps

    if R_s_arr.ndim == 0:
        return one(float(R_s_arr))
    return np.array([one(float(r)) for r in R_s_arr])


def nonadaptive_opt(params: SystemParams, model=None) -> DesignPoint:
    """Optimal non-adaptive design (n = N, theta_b at the root of G)."""
    _require_single(params)
    N = params.N
    R_e = invert_redundancy(params, 1.0, N, params.delta, model)
    Gb = params.Gamma_b
    theta0 = max(math.sqrt(math.expm1(R_e * LN2)), 1e-8)

    def G(t):
        return nonadaptive_G(t, R_e, N, Gb)

    lo, hi = expand_bracket_upper(G, theta0, max(2.0 * theta0, 1.0))
    theta = find_root(G, (lo, hi), TIGHT_TOL)
    R_s = math.log1p(theta * theta) * LOG2E - R_e
    return DesignPoint(
        mu=float(theta * theta / params.P_b), n=N, R_s=R_s, R_e=R_e,
        throughput=float(nonadaptive_throughput_theta(theta, R_e, N, Gb)),
        diagnostics={"theta_b": theta, "residual": G(theta)},
    )


def nonadaptive_rs_approx(params: SystemParams, model=None):
    """Large-gain approximations of the non-adaptive R_s.

    Returns ``(lambert_form, log_form)``: log2(e) W0(Gamma_b 2^-R_e) and
    its expansion log2(Gamma_b) - R_e - log2(ln Gamma_b - R_e ln 2). The
    log form is ``nan`` when its logarithm is undefined.
    """
    _require_single(params)
    R_e = invert_redundancy(params, 1.0, params.N, params.delta, model)
    x = params.Gamma_b * 2.0 ** (-R_e)
    w_form = LOG2E * lambert_w0(x)
    lx = math.log(params.Gamma_b) - R_e * LN2
    log_form = math.log2(params.Gamma_b) - R_e - math.log2(lx) if lx > 0 else math.nan
    return w_form, log_form
