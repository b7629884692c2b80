"""Scalar special functions and numeric primitives.

Everything here is a pure function. ``q_function``, ``capacity``,
``dispersion`` and ``reg_upper_gamma`` accept numpy arrays as well as
scalars; the iterative routines (``q_inverse``, ``lambert_w0``,
``find_root``, ``integrate``) are scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy import optimize, special

from .errors import BracketError, ConvergenceError, DomainError

LOG2E = 1.0 / math.log(2.0)
LOG2E_SQ = LOG2E * LOG2E
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    """Control parameters for the iterative solvers and quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")


DEFAULT_TOL = Tolerance()
# Used internally where a result feeds a finite-difference or residual check.
TIGHT_TOL = Tolerance(abs_tol=1e-14, rel_tol=4 * _EPS, max_iter=300)


def _as_float_or_array(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x) for standard normal Z."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("q_function requires finite input")
    return _as_float_or_array(0.5 * special.erfc(x / _SQRT2))


def _q_unchecked(x):
    # Internal variant: lets +-inf through (erfc handles them exactly).
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / _SQRT2)


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return _as_float_or_array(_INV_SQRT_2PI * np.exp(-0.5 * x * x))


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on (0, 1)."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"q_inverse requires 0 < p < 1, got {p}")
    # Rational (AS241) seed; computed from the smaller tail to keep precision.
    if p <= 0.5:
        x = -NormalDist().inv_cdf(p)
    else:
        x = NormalDist().inv_cdf(1.0 - p)
    for _ in range(3):
        dens = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
        if dens == 0.0:
            break
        step = (float(_q_unchecked(x)) - p) / dens
        x += step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def capacity(gamma):
    """Shannon capacity log2(1 + gamma) in bits per channel use."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise DomainError("capacity requires gamma >= 0")
    return _as_float_or_array(np.log1p(g) * LOG2E)


def dispersion(gamma):
    """Channel dispersion (1 - (1 + gamma)^-2) log2(e)^2."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise DomainError("dispersion requires gamma >= 0")
    # 1 - (1+g)^-2 = g (2 + g) / (1 + g)^2, exact near g = 0
    with np.errstate(invalid="ignore", over="ignore"):
        v = g * (2.0 + g) / ((1.0 + g) * (1.0 + g))
    v = np.where(np.isinf(g), 1.0, v)
    return _as_float_or_array(v * LOG2E_SQ)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, by Halley iteration."""
    x = float(x)
    branch = -1.0 / math.e
    if math.isnan(x) or x < branch - 1e-15:
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == math.inf:
        return math.inf
    if x <= branch:
        return -1.0
    if x == 0.0:
        return 0.0

    if x < -0.25:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x < 3.0:
        w = math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 4 * _EPS * (1.0 + abs(w)):
            break
    return w


def reg_upper_gamma(m: int, x):
    """Regularized upper incomplete gamma for integer order m >= 1.

    Returns sum_{k=0}^{m-1} x^k e^{-x} / k!, i.e. P(Gamma(m, 1) > x).
    """
    if int(m) != m or m < 1:
        raise DomainError(f"reg_upper_gamma requires integer m >= 1, got {m}")
    m = int(m)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise DomainError("reg_upper_gamma requires x >= 0")
    xs = xa[..., None]
    k = np.arange(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_terms = k * np.log(xs) - xs - special.gammaln(k + 1.0)
    log_terms = np.where((xs == 0.0) & (k == 0.0), 0.0, log_terms)
    log_terms = np.where(np.isnan(log_terms), -np.inf, log_terms)
    total = np.exp(log_terms).sum(axis=-1)
    return _as_float_or_array(np.clip(total, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7, 15) quadrature
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# Full symmetric 15-point rule on [-1, 1].
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_WK15 = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[[9, 11, 13]] = _WG[2::-1]


def _gk15(g, lo, hi):
    """Apply the (7, 15) rule to every interval [lo_i, hi_i] at once."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = g(pts.ravel()).reshape(pts.shape)
    k = half * (vals @ _WK15)
    gauss = half * (vals @ _WG15)
    return k, np.abs(k - gauss)


def integrate(f, a: float, b: float, tol: Tolerance = DEFAULT_TOL, vectorized: bool = True) -> float:
    """Adaptive quadrature of ``f`` over [a, b]; ``b`` may be +inf.

    ``f`` is called with 1-D float arrays when ``vectorized`` is true.
    Semi-infinite ranges use the substitution t = a + u / (1 - u).
    Raises :class:`ConvergenceError` (with the best estimate attached) if the
    error target is not met within ``tol.max_iter`` refinement levels.
    """
    a = float(a)
    b = float(b)
    if math.isnan(a) or math.isnan(b) or math.isinf(a):
        raise DomainError("integrate requires finite a and b > a or b = +inf")
    if b == a:
        return 0.0
    if b < a:
        return -integrate(f, b, a, tol, vectorized)

    if vectorized:
        fv = f
    else:
        def fv(t):
            return np.fromiter((f(float(ti)) for ti in t), dtype=float, count=len(t))

    if math.isinf(b):
        def g(u):
            one_minus = 1.0 - u
            return np.asarray(fv(a + u / one_minus), dtype=float) / (one_minus * one_minus)
        lo, hi = np.array([0.0]), np.array([1.0])
    else:
        def g(x):
            return np.asarray(fv(x), dtype=float)
        lo, hi = np.array([a]), np.array([b])

    # Seed with a few panels so narrow features are less likely to be missed.
    edges = np.linspace(lo[0], hi[0], 9)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk15(g, lo, hi)
    done_val = 0.0
    done_err = 0.0
    width = hi[-1] - lo[0]
    for _ in range(tol.max_iter):
        total = done_val + vals.sum()
        err = done_err + errs.sum()
        target = max(tol.abs_tol, tol.rel_tol * abs(total))
        if err <= target:
            return float(total)
        # Intervals whose error exceeds their length-proportional budget get split.
        budget = 0.5 * target * (hi - lo) / width
        split = errs > budget
        if not np.any(split):
            split = errs >= errs.max()
        done_val += vals[~split].sum()
        done_err += errs[~split].sum()
        slo, shi = lo[split], hi[split]
        smid = 0.5 * (slo + shi)
        if np.any((smid <= slo) | (smid >= shi)):
            break
        lo = np.concatenate([slo, smid])
        hi = np.concatenate([smid, shi])
        vals, errs = _gk15(g, lo, hi)
    total = done_val + vals.sum()
    err = done_err + errs.sum()
    if err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
        return float(total)
    raise ConvergenceError(
        f"integrate: error estimate {err:.3g} above target after {tol.max_iter} levels",
        best=float(total), error=float(err),
    )


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def find_root(f, bracket, tol: Tolerance = DEFAULT_TOL, df=None, f_tol: float = 0.0) -> float:
    """Root of ``f`` inside ``bracket = (lo, hi)`` with f(lo) f(hi) <= 0.

    Without ``df`` this is Brent's method. With ``df`` a Newton iteration is
    used, safeguarded by the shrinking bracket and falling back to bisection
    whenever a Newton step leaves the bracket or fails to shrink it.
    Iteration stops when the step (or bracket) falls below
    ``abs_tol + rel_tol * |x|`` or when ``|f(x)| <= f_tol``.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    f_lo, f_hi = float(f(lo)), float(f(hi))
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.isnan(f_lo) or math.isnan(f_hi) or (f_lo > 0) == (f_hi > 0):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}",
            lo, hi, f_lo, f_hi,
        )

    if df is None:
        try:
            return float(optimize.brentq(
                f, lo, hi, xtol=tol.abs_tol, rtol=max(tol.rel_tol, 4 * _EPS),
                maxiter=tol.max_iter,
            ))
        except RuntimeError as exc:
            raise ConvergenceError(f"find_root: {exc}", best=0.5 * (lo + hi)) from exc

    x = 0.5 * (lo + hi)
    for _ in range(tol.max_iter):
        fx = float(f(x))
        if fx == 0.0 or abs(fx) <= f_tol:
            return x
        if (fx > 0) == (f_lo > 0):
            lo, f_lo = x, fx
        else:
            hi = x
        dfx = float(df(x))
        x_new = x - fx / dfx if dfx != 0.0 and math.isfinite(dfx) else math.nan
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        step = abs(x_new - x)
        x = x_new
        if step <= tol.abs_tol + tol.rel_tol * abs(x) or hi - lo <= tol.abs_tol + tol.rel_tol * abs(x):
            return x
    raise ConvergenceError("find_root: Newton iteration did not converge", best=x)


def expand_bracket_upper(f, lo: float, hi: float, max_doublings: int = 200):
    """Double ``hi`` until f changes sign relative to f(lo); returns (lo, hi)."""
    f_lo = f(lo)
    f_hi = f(hi)
    for _ in range(max_doublings):
        if (f_lo > 0) != (f_hi > 0) or f_hi == 0:
            return lo, hi
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = f(hi)
    raise BracketError(f"no sign change found up to {hi}", lo, hi, f_lo, f_hi)


def decoding_error(gamma, n, rate):
    """Normal-approximation block error Q((C(gamma) - R) / sqrt(V(gamma) / n)).

    At gamma = 0 the dispersion vanishes; the error is 1 for rate > 0 and
    0.5 for rate = 0.
    """
    g = np.asarray(gamma, dtype=float)
    c = capacity(g)
    v = np.asarray(dispersion(g))
    diff = c - rate
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = diff * np.sqrt(n / v)
    arg = np.where(v > 0, arg, np.where(diff > 0, np.inf, np.where(diff < 0, -np.inf, 0.0)))
    return _as_float_or_array(_q_unchecked(arg))
