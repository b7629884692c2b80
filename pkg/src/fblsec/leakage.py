"""Information-leakage probability and its inversion.

The leakage probability is the chance that Eve decodes the bin index, i.e.
E[1 - eps(gamma_e, n, R_e)] over Eve's SINR. Three evaluation models are
offered:

* ``EXACT`` integrates the normal-approximation error against Eve's density.
* ``PIECEWISE`` replaces Q by its linearization around the capacity point,
  which reduces the expectation to an integral of Eve's CDF over a short
  interval.
* ``ASYMPTOTIC`` drops the blocklength altogether (the Q-function becomes a
  step), leaving P(gamma_e > 2^R_e - 1). Only used with multi-antenna AN.
"""

from __future__ import annotations

import enum
import functools
import math

import numpy as np

from .channel import SystemParams, cdf_gamma_e, pdf_gamma_e, _eve_survival
from .errors import DomainError, InfeasibleError, ModelError, PreconditionError
from .specfun import (
    TIGHT_TOL,
    Tolerance,
    decoding_error,
    expand_bracket_upper,
    find_root,
    integrate,
)

_QUAD_TOL = Tolerance(abs_tol=1e-13, rel_tol=1e-11, max_iter=60)


class LeakageModel(enum.Enum):
    EXACT = "exact"
    PIECEWISE = "piecewise"
    ASYMPTOTIC = "asymptotic"

    @classmethod
    def parse(cls, value) -> "LeakageModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown leakage model {value!r}; expected one of {names}") from None


def default_model(params: SystemParams) -> LeakageModel:
    return LeakageModel.EXACT if params.M == 1 else LeakageModel.ASYMPTOTIC


def _effective_phi(params, phi):
    phi = 1.0 if params.M == 1 else float(phi)
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"phi must lie in [0, 1], got {phi}")
    return phi


def _check_rate(R_e, n):
    if not R_e > 0:
        raise DomainError(f"R_e must be > 0, got {R_e}")
    if not n >= 1:
        raise DomainError(f"blocklength n must be >= 1, got {n}")


def leakage_exact(params: SystemParams, phi: float, n: float, R_e: float) -> float:
    """Leakage by quadrature of (1 - eps(gamma, n, R_e)) f_{gamma_e}(gamma)."""
    _check_rate(R_e, n)
    phi = _effective_phi(params, phi)
    if math.isinf(R_e):
        return 0.0
    if params.M > 1 and phi == 0.0:
        return 0.0
    if params.M > 1 and params.worst_case_eve and phi == 1.0:
        return 1.0

    def integrand(g):
        return (1.0 - decoding_error(g, n, R_e)) * pdf_gamma_e(params, phi, g)

    # The integrand switches on around gamma = 2^R_e - 1; split there.
    knee = math.expm1(R_e * math.log(2.0))
    head = integrate(integrand, 0.0, knee, _QUAD_TOL)
    tail = integrate(integrand, knee, math.inf, _QUAD_TOL)
    return min(1.0, max(0.0, head + tail))


def piecewise_bounds(n: float, R_e: float):
    """(beta, theta, tau_lo, tau_hi) of the linearized Q-function."""
    beta = math.sqrt(n) / (2.0 * math.pi)
    theta = math.sqrt(math.expm1(R_e * math.log(2.0)))
    half = theta / (2.0 * beta)
    return beta, theta, theta * theta - half, theta * theta + half


def min_piecewise_rate(n: float) -> float:
    """Smallest R_e for which the linearization's lower knee is positive."""
    return math.log2(1.0 + math.pi ** 2 / n)


def leakage_piecewise(params: SystemParams, phi: float, n: float, R_e: float, cdf=None) -> float:
    """Leakage with the piecewise-linear Q surrogate.

    O_e = 1 - (beta / theta) * integral of F(gamma) over [tau_lo, tau_hi].
    ``cdf`` overrides Eve's CDF (vectorized callable of gamma); by default
    the single-antenna-Eve CDF for ``params`` and ``phi`` is used.
    """
    _check_rate(R_e, n)
    phi = _effective_phi(params, phi)
    if R_e <= min_piecewise_rate(n):
        raise PreconditionError(
            f"piecewise leakage needs R_e > log2(1 + pi^2/n) = {min_piecewise_rate(n):.6g} "
            f"so that the lower knee is positive (got R_e={R_e}, n={n})"
        )
    beta, theta, lo, hi = piecewise_bounds(n, R_e)
    if cdf is None and params.M == 1:
        G = params.Gamma_e
        # Closed form of the exponential-CDF integral.
        val = (beta * G / theta) * (math.exp(-lo / G) - math.exp(-hi / G))
        return min(1.0, max(0.0, val))
    if cdf is None:
        def cdf(g):
            return cdf_gamma_e(params, phi, g)
    # Integrate the survival function: exact cancellation of the leading 1.
    surv = integrate(lambda g: 1.0 - np.asarray(cdf(g), dtype=float), lo, hi, _QUAD_TOL)
    return min(1.0, max(0.0, (beta / theta) * surv))


def leakage_asymptotic(params: SystemParams, phi: float, Phi_e: float) -> float:
    """Large-blocklength leakage P(gamma_e > Phi_e) under null-space AN."""
    if params.M < 2:
        raise ModelError("asymptotic leakage model requires M >= 2; use LeakageModel.EXACT")
    phi = _effective_phi(params, phi)
    if not Phi_e >= 0:
        raise DomainError(f"Phi_e must be >= 0, got {Phi_e}")
    return float(_eve_survival(params, phi, np.asarray(float(Phi_e))))


def leakage(params: SystemParams, phi: float, n: float, R_e: float, model=None) -> float:
    """Dispatch to the selected leakage model (rate-parametrized)."""
    model = default_model(params) if model is None else LeakageModel.parse(model)
    if model is LeakageModel.EXACT:
        return leakage_exact(params, phi, n, R_e)
    if model is LeakageModel.PIECEWISE:
        return leakage_piecewise(params, phi, n, R_e)
    _check_rate(R_e, n)
    return leakage_asymptotic(params, phi, math.expm1(R_e * math.log(2.0)))


def invert_redundancy(params: SystemParams, phi: float, n: float, delta: float, model=None) -> float:
    """Smallest rate redundancy R_e* whose leakage equals ``delta``."""
    model = default_model(params) if model is None else LeakageModel.parse(model)
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    if delta == 1.0:
        return 0.0
    if delta == 0.0:
        raise InfeasibleError("delta = 0 is infeasible: leakage is positive for every finite R_e")
    phi = _effective_phi(params, phi)
    return _invert_cached(params, phi, float(n), delta, model)


@functools.lru_cache(maxsize=4096)
def _invert_cached(params, phi, n, delta, model):
    if model is LeakageModel.ASYMPTOTIC:
        if params.M < 2:
            raise ModelError("asymptotic leakage model requires M >= 2; use LeakageModel.EXACT")
        rho = rho_e(params, phi, delta)
        if math.isinf(rho):
            raise InfeasibleError("worst-case Eve with phi = 1 leaks with probability 1")
        return math.log1p(phi * rho) / math.log(2.0)

    if model is LeakageModel.EXACT:
        lo = 1e-6
    else:
        lo = max(1e-6, min_piecewise_rate(n) * (1.0 + 1e-9))

    def excess(r):
        return leakage(params, phi, n, r, model) - delta

    if excess(lo) <= 0.0:
        return lo
    lo, hi = expand_bracket_upper(excess, lo, max(1.0, 2.0 * lo))
    return find_root(excess, (lo, hi), TIGHT_TOL)


# ---------------------------------------------------------------------------
# Normalized SINR threshold of the asymptotic model
# ---------------------------------------------------------------------------

def worst_case_lambda(M: int, delta: float) -> float:
    """(M - 1)(delta^(1/(1-M)) - 1): Eve's threshold scale without noise."""
    if M < 2:
        raise DomainError("worst-case threshold needs M >= 2")
    return (M - 1) * (delta ** (1.0 / (1.0 - M)) - 1.0)


def _check_rho_args(params, phi, delta):
    if params.M < 2:
        raise DomainError("rho_e is defined for M >= 2")
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"phi must lie in [0, 1], got {phi}")
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    if delta == 0.0:
        raise InfeasibleError("delta = 0 is infeasible")


def rho_e(params: SystemParams, phi: float, delta: float | None = None) -> float:
    """Eve's SINR threshold divided by phi, from the asymptotic model.

    Solves exp(-rho/Gamma_e) (1 + (1 - phi) rho / (M - 1))^(1-M) = delta,
    a form that stays well defined at phi = 0.
    """
    delta = params.delta if delta is None else float(delta)
    phi = float(phi)
    _check_rho_args(params, phi, delta)
    if delta == 1.0:
        return 0.0
    M = params.M
    if params.worst_case_eve:
        if phi == 1.0:
            return math.inf
        return worst_case_lambda(M, delta) / (1.0 - phi)
    return _rho_e_root(params.Gamma_e, M, phi, delta)


@functools.lru_cache(maxsize=65536)
def _rho_e_root(Gamma_e, M, phi, delta):
    target = math.log(1.0 / delta)
    if phi == 1.0:
        return Gamma_e * target
    c = (1.0 - phi) / (M - 1)

    def h(r):
        return r / Gamma_e + (M - 1) * math.log1p(c * r) - target

    def dh(r):
        return 1.0 / Gamma_e + (1.0 - phi) / (1.0 + c * r)

    # h(0) < 0 and the noise term alone reaches the target at Gamma_e * target.
    return find_root(h, (0.0, Gamma_e * target), TIGHT_TOL, df=dh)


def drho_e_dphi(params: SystemParams, phi: float, delta: float | None = None) -> float:
    """Closed-form derivative of :func:`rho_e` with respect to phi."""
    delta = params.delta if delta is None else float(delta)
    phi = float(phi)
    _check_rho_args(params, phi, delta)
    if delta == 1.0:
        return 0.0
    if params.worst_case_eve:
        if phi == 1.0:
            return math.inf
        return worst_case_lambda(params.M, delta) / (1.0 - phi) ** 2
    r = rho_e(params, phi, delta)
    an = 1.0 + (1.0 - phi) * r / (params.M - 1)
    return r / (an / params.Gamma_e + 1.0 - phi)
