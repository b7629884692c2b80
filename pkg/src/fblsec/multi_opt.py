"""Secrecy-throughput optimization for a multi-antenna transmitter with AN.

Alice beamforms toward Bob with a fraction ``phi`` of the power and spreads
artificial noise over the null space of h_b. The information fraction
``alpha`` is fixed to 1 in every optimizer (injecting AN along the beam never
helps); :func:`ps_multi_alpha` keeps the general form for checking that.

Rate redundancy follows the asymptotic leakage model:
R_e = log2(1 + phi rho_e(phi)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .channel import ChannelSnapshot, SystemParams, cdf_gamma_e_multi, kappa
from .errors import BracketError, DomainError
from .leakage import drho_e_dphi, rho_e, worst_case_lambda
from .single_opt import DesignPoint, conditional_throughput_drs, optimal_secrecy_rate
from .specfun import (
    LOG2E,
    TIGHT_TOL,
    Tolerance,
    dispersion,
    expand_bracket_upper,
    find_root,
    integrate,
    lambert_w0,
    q_function,
    reg_upper_gamma,
)

LN2 = math.log(2.0)
# Upper end of the phi search when Eve is noise-free (rho_e blows up at 1).
_PHI_HI_WORST = 1.0 - 1e-9
_PHI_GRID_LO = np.geomspace(1e-6, 0.05, 12, endpoint=False)


def _require_multi(params: SystemParams):
    if params.M < 2:
        raise DomainError(f"multi-antenna routines need M >= 2, got M = {params.M}")


def _delta(params, delta):
    return params.delta if delta is None else float(delta)


def _phi_upper(params) -> float:
    return _PHI_HI_WORST if params.worst_case_eve else 1.0


def _phi_grid(params, points: int = 40) -> np.ndarray:
    return np.concatenate([_PHI_GRID_LO, np.linspace(0.05, _phi_upper(params), points)])


def multi_threshold(params: SystemParams, delta=None) -> float:
    """On-off threshold mu* = rho_e(0) / P_b."""
    _require_multi(params)
    return rho_e(params, 0.0, _delta(params, delta)) / params.P_b


def lambda_pair(params: SystemParams, snapshot: ChannelSnapshot, phi: float, delta=None):
    """(lambda_b, lambda_e) = (1 + phi rho_b, 1 + phi rho_e(phi))."""
    _require_multi(params)
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"phi must lie in [0, 1], got {phi}")
    rb = snapshot.rho_b(params)
    re = rho_e(params, phi, _delta(params, delta))
    return 1.0 + phi * rb, 1.0 + phi * re


def _ps_from_lambdas(lb, le, R_s, n):
    if lb <= 1.0:
        return 0.0
    arg = math.sqrt(n) * lb * (math.log(lb / le) - R_s * LN2) / math.sqrt((lb - 1.0) * (lb + 1.0))
    return 1.0 - q_function(arg)


def ps_multi(params: SystemParams, snapshot, phi, R_s, n=None, delta=None) -> float:
    """Bob's success probability with alpha = 1 and R_e = log2 lambda_e."""
    n = params.N if n is None else n
    lb, le = lambda_pair(params, snapshot, phi, delta)
    return _ps_from_lambdas(lb, le, R_s, n)


def ps_multi_alpha(params: SystemParams, snapshot, phi, alpha, R_s, n=None, delta=None) -> float:
    """Success probability for a general information fraction ``alpha``.

    Both SINR and Eve's threshold map through kappa(., alpha); the quantile
    of a kappa-transformed SINR is the kappa-transform of the quantile.
    """
    n = params.N if n is None else n
    _require_multi(params)
    rb = snapshot.rho_b(params)
    re = rho_e(params, phi, _delta(params, delta))
    lb = 1.0 + kappa(phi * rb, alpha)
    le = 1.0 + kappa(phi * re, alpha)
    return _ps_from_lambdas(lb, le, R_s, n)


# ---------------------------------------------------------------------------
# phi-step: maximize L(phi)
# ---------------------------------------------------------------------------

def L_function(params: SystemParams, snapshot, phi, R_s, delta=None) -> float:
    """lambda_b / sqrt(lambda_b^2 - 1) * (ln(lambda_b / lambda_e) - R_s ln 2)."""
    lb, le = lambda_pair(params, snapshot, phi, delta)
    if lb <= 1.0:
        return -math.inf if R_s > 0 else 0.0
    return lb / math.sqrt((lb - 1.0) * (lb + 1.0)) * (math.log(lb / le) - R_s * LN2)


def dL_dphi(params: SystemParams, snapshot, phi, R_s, delta=None) -> float:
    """Analytic derivative of :func:`L_function` in phi."""
    delta = _delta(params, delta)
    rb = snapshot.rho_b(params)
    re = rho_e(params, phi, delta)
    dre = drho_e_dphi(params, phi, delta)
    lb, le = 1.0 + phi * rb, 1.0 + phi * re
    A = phi / le * (re + phi * dre)
    B = math.log(le) + R_s * LN2
    s2 = (lb - 1.0) * (lb + 1.0)
    s = math.sqrt(s2)
    return ((1.0 - A) * lb - 1.0) / (phi * s) - (lb - 1.0) * (math.log(lb) - B) / (phi * s2 * s)


def _A1_B1(params, R_s, delta):
    r1 = rho_e(params, 1.0, delta)
    A1 = (1.0 + params.Gamma_e) * r1 / (1.0 + r1)
    B1 = math.log1p(r1) + R_s * LN2
    return A1, B1


def X_function(params: SystemParams, rho_b, R_s, delta=None):
    """Sign of dL/dphi at phi = 1, as a function of rho_b (finite Gamma_e)."""
    _require_multi(params)
    if params.worst_case_eve:
        raise DomainError("X(rho_b) needs finite Gamma_e (phi = 1 is never optimal for a noise-free Eve)")
    A1, B1 = _A1_B1(params, R_s, _delta(params, delta))
    rb = np.asarray(rho_b, dtype=float)
    out = (1.0 - A1) * (1.0 + rb) - 1.0 - (np.log1p(rb) - B1) / (2.0 + rb)
    return float(out) if out.ndim == 0 else out


def dX_drho_b(params: SystemParams, rho_b, R_s, delta=None) -> float:
    A1, B1 = _A1_B1(params, R_s, _delta(params, delta))
    rb = float(rho_b)
    return (1.0 - A1) - 1.0 / ((1.0 + rb) * (2.0 + rb)) + (math.log1p(rb) - B1) / (2.0 + rb) ** 2


def rho_b_circ(params: SystemParams, R_s, delta=None) -> float:
    """Smallest feasible rho_b from which phi* = 1; ``inf`` if never.

    Searched on [e^B1 - 1, inf), the range where L(1) >= 0, by doubling.
    """
    _require_multi(params)
    delta = _delta(params, delta)
    if params.worst_case_eve:
        return math.inf
    A1, B1 = _A1_B1(params, R_s, delta)
    if A1 >= 1.0:
        return math.inf
    lo = math.expm1(B1)

    def X(r):
        return X_function(params, r, R_s, delta)

    if X(lo) >= 0.0:
        return lo
    lo, hi = expand_bracket_upper(X, lo, max(2.0 * lo, 1.0))
    return find_root(X, (lo, hi), TIGHT_TOL)


def _maximize_scan(grid, vals, df, upper_is_boundary: bool):
    """Maximize a unimodal function sampled as ``vals`` on ``grid``; polish at df = 0."""
    vals = np.where(np.isnan(vals), -np.inf, np.asarray(vals, dtype=float))
    i = int(np.argmax(vals))
    if i == len(grid) - 1 and upper_is_boundary and df(grid[-1]) >= 0.0:
        return float(grid[-1])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    try:
        return find_root(df, (lo, hi), TIGHT_TOL)
    except BracketError:
        # df does not change sign between neighbours (flat or clipped).
        return float(grid[i])


def adaptive_phi_opt(params: SystemParams, snapshot, R_s, delta=None) -> float:
    """Power fraction maximizing L(phi) (hence p_s) for a fixed R_s."""
    _require_multi(params)
    delta = _delta(params, delta)
    rb = snapshot.rho_b(params)
    if rb <= 0.0:
        raise DomainError("adaptive_phi_opt needs eta > 0")
    if not params.worst_case_eve:
        A1, _ = _A1_B1(params, R_s, delta)
        if rb >= rho_b_circ(params, R_s, delta) and A1 < 1.0:
            return 1.0

    def f(p):
        return L_function(params, snapshot, p, R_s, delta)

    def df(p):
        return dL_dphi(params, snapshot, p, R_s, delta)

    if not params.worst_case_eve and df(1.0) >= 0.0:
        return 1.0
    grid = _phi_grid(params)
    return _maximize_scan(grid, [f(p) for p in grid], df, upper_is_boundary=False)


def _rs_step(params, snapshot, phi, delta, N):
    lb, le = lambda_pair(params, snapshot, phi, delta)
    C_b, R_e = math.log2(lb), math.log2(le)
    R_s = optimal_secrecy_rate(C_b, dispersion(lb - 1.0), R_e, N)
    return R_s, R_s * _ps_from_lambdas(lb, le, R_s, N)


def adaptive_rs_opt(params: SystemParams, snapshot, phi, delta=None) -> float:
    """Secrecy rate maximizing the conditional throughput at a fixed phi."""
    _require_multi(params)
    return _rs_step(params, snapshot, phi, _delta(params, delta), params.N)[0]


@dataclass(frozen=True)
class AoState:
    k: int
    phi: float
    R_s: float
    throughput: float
    converged: bool = False


def ao_optimize(params: SystemParams, snapshot: ChannelSnapshot, tol: float = 1e-10, max_iter: int = 500,
                phi0: float | None = None, R_s0: float = 0.0, x_tol: float = 1e-11, delta=None):
    """Alternating optimization of (phi, R_s) for one realization of eta.

    Each sweep runs the exact phi-step then the exact R_s-step, so the
    throughput trace is nondecreasing. Iteration stops once the relative
    throughput change drops below ``tol`` and both coordinates move by
    less than ``x_tol``. Returns ``(DesignPoint, list[AoState])``.
    """
    _require_multi(params)
    delta = _delta(params, delta)
    N = params.N
    mu = multi_threshold(params, delta)
    if snapshot.eta <= mu:
        dp = DesignPoint(mu=mu, n=N, R_s=0.0, R_e=0.0, throughput=0.0, phi=0.0,
                         diagnostics={"regime": "off", "iterations": 0, "converged": True})
        return dp, [AoState(0, 0.0, 0.0, 0.0, True)]

    phi = adaptive_phi_opt(params, snapshot, R_s0, delta) if phi0 is None else float(phi0)
    R_s = R_s0
    T_prev = R_s * ps_multi(params, snapshot, phi, R_s, N, delta)
    trace = [AoState(0, phi, R_s, T_prev)]
    converged = False
    for k in range(1, max_iter + 1):
        phi_new = adaptive_phi_opt(params, snapshot, R_s, delta)
        R_new, T = _rs_step(params, snapshot, phi_new, delta, N)
        dphi, dR = abs(phi_new - phi), abs(R_new - R_s)
        rel = abs(T - T_prev) / T_prev if T_prev > 0 else math.inf
        phi, R_s = phi_new, R_new
        converged = rel < tol and max(dphi, dR) < x_tol
        trace.append(AoState(k, phi, R_s, T, converged))
        T_prev = T
        if converged:
            break

    lb, le = lambda_pair(params, snapshot, phi, delta)
    res_rs = conditional_throughput_drs(R_s, math.log2(lb), dispersion(lb - 1.0), math.log2(le), N) if R_s > 0 else 0.0
    res_phi = dL_dphi(params, snapshot, phi, R_s, delta) if phi < 1.0 else 0.0
    dp = DesignPoint(
        mu=mu, n=N, R_s=R_s, R_e=math.log2(le), throughput=trace[-1].throughput, phi=phi,
        diagnostics={"regime": "on", "iterations": len(trace) - 1, "converged": converged,
                     "residual_phi": res_phi, "residual_rs": res_rs},
    )
    return dp, trace


def adaptive_expected_throughput_multi(params: SystemParams, tol: Tolerance | None = None) -> float:
    """Average AO throughput over eta ~ Gamma(M, sigma_b2).

    An extension: the conditional optimum is re-solved at every quadrature
    node, so this is slow (a few seconds).
    """
    _require_multi(params)
    tol = tol or Tolerance(abs_tol=1e-8, rel_tol=1e-6, max_iter=40)
    M, s2 = params.M, params.sigma_b2
    mu = multi_threshold(params)
    log_norm = M * math.log(s2) + math.lgamma(M)

    def integrand(eta):
        dp, _ = ao_optimize(params, ChannelSnapshot(eta=eta), tol=1e-10)
        return dp.throughput * math.exp((M - 1) * math.log(eta) - eta / s2 - log_norm)

    return integrate(integrand, mu, math.inf, tol, vectorized=False)


# ---------------------------------------------------------------------------
# Non-adaptive scheme
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _band_integrals(M, r1, r2):
    """Integrals over [r1, r2] of g, (x - r1) g, (r2 - x) g and Gbar(M, x).

    g(x) = x^(M-1) e^-x / (M-1)! is minus the derivative of Gbar(M, x).
    Short bands use Gauss-Legendre (no cancellation); wide ones use the
    incomplete-gamma identities. Accepts arrays.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    D = r2 - r1
    short = D <= 2.0
    x = r1[..., None] + 0.5 * D[..., None] * (_GL_X + 1.0)
    w = 0.5 * D[..., None] * _GL_W
    with np.errstate(divide="ignore"):
        g = np.exp((M - 1) * np.log(x) - x - math.lgamma(M)) if M > 1 else np.exp(-x)
    gl = (
        np.sum(w * g, axis=-1),
        np.sum(w * (x - r1[..., None]) * g, axis=-1),
        np.sum(w * (r2[..., None] - x) * g, axis=-1),
        np.sum(w * reg_upper_gamma(M, x), axis=-1),
    )
    if np.all(short):
        return gl
    G1a, G1b = reg_upper_gamma(M, r1), reg_upper_gamma(M, r2)
    G2d = reg_upper_gamma(M + 1, r1) - reg_upper_gamma(M + 1, r2)
    J0 = G1a - G1b
    wide = (
        J0,
        M * G2d - r1 * J0,
        r2 * J0 - M * G2d,
        sum(reg_upper_gamma(k + 1, r1) - reg_upper_gamma(k + 1, r2) for k in range(M)),
    )
    return tuple(np.where(short, a, b) for a, b in zip(gl, wide))


def _g(M, x):
    if x == 0.0:
        return 1.0 if M == 1 else 0.0
    return math.exp((M - 1) * math.log(x) - x - math.lgamma(M))


def nonadaptive_pbar(M: int, theta, phi: float, Gamma_b: float, n: float):
    """Average success probability above the threshold theta^2 (piecewise-linear Q)."""
    theta = np.asarray(theta, dtype=float)
    beta = math.sqrt(n) / (2.0 * math.pi)
    s = phi * Gamma_b
    r1 = theta * theta / s
    D = theta / (2.0 * beta * s)
    I = _band_integrals(M, r1, r1 + D)[3]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(D > 0, 0.5 * reg_upper_gamma(M, r1) + I / (2.0 * D), reg_upper_gamma(M, r1))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class _NaState:
    theta: float
    r1: float
    D: float
    beta: float
    s: float
    lam_e: float
    dlam_e: float


def _na_state(params, phi, R_s, n, delta, need_derivative=True) -> _NaState:
    re = rho_e(params, phi, delta)
    lam_e = 1.0 + phi * re
    dlam_e = re + phi * drho_e_dphi(params, phi, delta) if need_derivative else math.nan
    theta = math.sqrt(2.0 ** R_s * lam_e - 1.0)
    beta = math.sqrt(n) / (2.0 * math.pi)
    s = phi * params.Gamma_b
    return _NaState(theta, theta * theta / s, theta / (2.0 * beta * s), beta, s, lam_e, dlam_e)


def _check_na(params, phi, R_s):
    _require_multi(params)
    if not 0.0 < phi <= 1.0:
        raise DomainError(f"phi must lie in (0, 1], got {phi}")
    if np.any(np.asarray(R_s) < 0):
        raise DomainError(f"R_s must be >= 0, got {R_s}")


def nonadaptive_mu_multi(params: SystemParams, phi, R_s, delta=None) -> float:
    """Threshold (2^R_s (1 + phi rho_e) - 1) / (phi P_b)."""
    st = _na_state(params, phi, R_s, params.N, _delta(params, delta), need_derivative=False)
    return st.theta ** 2 / (phi * params.P_b)


def nonadaptive_throughput_multi(params: SystemParams, phi, R_s, n=None, delta=None):
    """Non-adaptive throughput R_s pbar for the AN scheme (``R_s`` may be an array)."""
    R_s = np.asarray(R_s, dtype=float)
    _check_na(params, phi, R_s)
    n = params.N if n is None else n
    delta = _delta(params, delta)
    if params.worst_case_eve and phi == 1.0:
        out = np.zeros_like(R_s)
    else:
        lam_e = 1.0 + phi * rho_e(params, phi, delta)
        theta = np.sqrt(2.0 ** R_s * lam_e - 1.0)
        out = R_s * nonadaptive_pbar(params.M, theta, phi, params.Gamma_b, n)
    return float(out) if out.ndim == 0 else out


def _na_derivatives(params, phi, R_s, n, delta):
    st = _na_state(params, phi, R_s, n, delta)
    M = params.M
    r1, D, theta, beta = st.r1, st.D, st.theta, st.beta
    J0, J1, J2, I = (float(v) for v in _band_integrals(M, r1, r1 + D))
    G1 = reg_upper_gamma(M, r1)
    g1 = _g(M, r1)
    pbar = 0.5 * G1 + I / (2.0 * D)
    two_R = 2.0 ** R_s
    # phi direction: d r1/dphi = -r1 w1, dD/dphi = -D w2.
    w1 = 1.0 / phi - two_R * st.dlam_e / theta ** 2
    w2 = 1.0 / phi - two_R * st.dlam_e / (2.0 * theta ** 2)
    dT_dphi = R_s * (0.5 * w1 * r1 * g1 + beta * theta * w1 * J0 + w2 * J1 / (2.0 * D))
    # R_s direction: d r1/dR = u, dD/dR = u / (4 beta theta).
    u = two_R * LN2 * st.lam_e / st.s
    dp1 = -0.5 * g1 - J2 / (2.0 * D * D)
    dp2 = -J1 / (2.0 * D * D)
    dT_dR = pbar + R_s * u * (dp1 + dp2 * (1.0 + 1.0 / (4.0 * beta * theta)))
    return float(dT_dphi), float(dT_dR)


def nonadaptive_dT_dphi_multi(params: SystemParams, phi, R_s, n=None, delta=None) -> float:
    """Partial derivative of :func:`nonadaptive_throughput_multi` in phi."""
    _check_na(params, phi, R_s)
    n = params.N if n is None else n
    return _na_derivatives(params, phi, R_s, n, _delta(params, delta))[0]


def nonadaptive_dT_dRs_multi(params: SystemParams, phi, R_s, n=None, delta=None) -> float:
    """Partial derivative of :func:`nonadaptive_throughput_multi` in R_s."""
    _check_na(params, phi, R_s)
    n = params.N if n is None else n
    return _na_derivatives(params, phi, R_s, n, _delta(params, delta))[1]


def _rs_upper(params, phi, delta):
    # Beyond this rate the threshold sits ~60 mean-gains above Bob's SNR.
    lam_e = 1.0 + phi * rho_e(params, phi, delta)
    return max(math.log2((1.0 + (params.M + 60.0) * phi * params.Gamma_b) / lam_e), 1e-3)


def _na_best_rs(params, phi, n, delta):
    hi = _rs_upper(params, phi, delta)
    grid = np.linspace(hi / 400.0, hi, 400)
    return _maximize_scan(
        grid, nonadaptive_throughput_multi(params, phi, grid, n, delta),
        lambda r: nonadaptive_dT_dRs_multi(params, phi, r, n, delta),
        upper_is_boundary=False,
    )


def _na_best_phi(params, R_s, n, delta):
    grid = _phi_grid(params)
    return _maximize_scan(
        grid, [nonadaptive_throughput_multi(params, p, R_s, n, delta) for p in grid],
        lambda p: nonadaptive_dT_dphi_multi(params, p, R_s, n, delta),
        upper_is_boundary=not params.worst_case_eve,
    )


def nonadaptive_rs_opt_multi(params: SystemParams, phi, n=None, delta=None) -> float:
    """Non-adaptive R_s maximizing throughput at a fixed phi."""
    _check_na(params, phi, 0.0)
    return _na_best_rs(params, phi, params.N if n is None else n, _delta(params, delta))


def nonadaptive_phi_opt_multi(params: SystemParams, R_s, n=None, delta=None) -> float:
    """Non-adaptive phi maximizing throughput at a fixed R_s."""
    _check_na(params, 1.0, R_s)
    return _na_best_phi(params, R_s, params.N if n is None else n, _delta(params, delta))


def nonadaptive_opt_multi(params: SystemParams, tol: float = 1e-10, max_iter: int = 500,
                          x_tol: float = 1e-11, n=None, delta=None):
    """Alternate the phi- and R_s-solves of the non-adaptive AN design.

    Returns ``(DesignPoint, list[AoState])``; the DesignPoint's ``mu`` is the
    threshold on eta, n* = N.
    """
    _require_multi(params)
    n = params.N if n is None else n
    delta = _delta(params, delta)
    phi = 0.5 if params.worst_case_eve else 1.0
    R_s = _na_best_rs(params, phi, n, delta)
    T_prev = nonadaptive_throughput_multi(params, phi, R_s, n, delta)
    trace = [AoState(0, phi, R_s, T_prev)]
    converged = False
    for k in range(1, max_iter + 1):
        phi_new = _na_best_phi(params, R_s, n, delta)
        R_new = _na_best_rs(params, phi_new, n, delta)
        T = nonadaptive_throughput_multi(params, phi_new, R_new, n, delta)
        rel = abs(T - T_prev) / T_prev if T_prev > 0 else math.inf
        converged = rel < tol and max(abs(phi_new - phi), abs(R_new - R_s)) < x_tol
        phi, R_s = phi_new, R_new
        trace.append(AoState(k, phi, R_s, T, converged))
        T_prev = T
        if converged:
            break
    d_phi, d_rs = _na_derivatives(params, phi, R_s, n, delta)
    dp = DesignPoint(
        mu=nonadaptive_mu_multi(params.with_(N=n), phi, R_s, delta), n=n, R_s=R_s,
        R_e=math.log2(1.0 + phi * rho_e(params, phi, delta)), throughput=float(T_prev), phi=phi,
        diagnostics={"iterations": len(trace) - 1, "converged": converged,
                     "residual_phi": d_phi if phi < 1.0 else 0.0, "residual_rs": d_rs},
    )
    return dp, trace


class HighSnrApprox(NamedTuple):
    throughput: Callable[[float, float], float]
    phi: float
    R_s: float


def high_snr_approx(params: SystemParams, delta=None) -> HighSnrApprox:
    """Large-Gamma_b form of the non-adaptive throughput and its optimum.

    The evaluator is R_s (1 - rho1^M / (2 M!)) and does not depend on the
    blocklength. Closed forms need a noise-free Eve (worst_case_eve).
    """
    _require_multi(params)
    if not params.worst_case_eve:
        raise DomainError("high-SNR closed forms assume worst_case_eve=True")
    delta = _delta(params, delta)
    M, Gb = params.M, params.Gamma_b
    Lam = worst_case_lambda(M, delta)
    fact = math.factorial(M)

    def throughput(phi, R_s):
        lam_e = 1.0 + phi * rho_e(params, phi, delta)
        r1 = (2.0 ** R_s * lam_e - 1.0) / (phi * Gb)
        return R_s * (1.0 - r1 ** M / (2.0 * fact))

    root = math.sqrt(Lam) + 1.0
    # W0 argument computed in logs: Gamma_b^M overflows quickly.
    log_arg = math.log(2.0 * fact) + 1.0 + M * math.log(Gb) - 2 * M * math.log(root)
    w = lambert_w0(math.exp(log_arg)) if log_arg < 700 else _w0_from_log(log_arg)
    return HighSnrApprox(throughput, 1.0 / root, (w - 1.0) / (M * LN2))


def _w0_from_log(L):
    # W0(e^L) for large L: solve w + ln w = L by Newton.
    w = L - math.log(L)
    for _ in range(50):
        step = (w + math.log(w) - L) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) < 1e-15 * w:
            break
    return w


# ---------------------------------------------------------------------------
# Multi-antenna Eve
# ---------------------------------------------------------------------------

def leakage_multi_eve(params: SystemParams, phi, n, R_e, normalization: str = "literal") -> float:
    """Piecewise-linear leakage against an M_e-antenna MMSE Eve.

    O_e = 1 - (beta / theta) * integral of F over [tau_lo, tau_hi]. Eve's SINR
    is nonnegative, so a negative tau_lo is clipped to 0 (the linearized
    error is then never evaluated below zero SINR).
    """
    _require_multi(params)
    if not R_e > 0:
        raise DomainError(f"R_e must be > 0, got {R_e}")
    beta = math.sqrt(n) / (2.0 * math.pi)
    theta = math.sqrt(math.expm1(R_e * LN2))
    half = theta / (2.0 * beta)
    lo = max(0.0, theta * theta - half)
    hi = theta * theta + half

    def F(g):
        return cdf_gamma_e_multi(params, phi, g, normalization)

    val = integrate(F, lo, hi, Tolerance(1e-14, 1e-11, 60))
    return min(1.0, max(0.0, 1.0 - beta / theta * val))


__all__ = [
    "AoState", "HighSnrApprox", "L_function", "X_function", "adaptive_expected_throughput_multi",
    "adaptive_phi_opt", "adaptive_rs_opt", "ao_optimize", "dL_dphi", "dX_drho_b", "high_snr_approx",
    "lambda_pair", "leakage_multi_eve", "multi_threshold", "nonadaptive_dT_dRs_multi",
    "nonadaptive_dT_dphi_multi", "nonadaptive_mu_multi", "nonadaptive_opt_multi", "nonadaptive_pbar",
    "nonadaptive_phi_opt_multi", "nonadaptive_rs_opt_multi", "nonadaptive_throughput_multi", "ps_multi",
    "ps_multi_alpha", "rho_b_circ",
]
