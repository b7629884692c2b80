"""Independent checks: Monte-Carlo estimators, grid search, finite differences.

Monte-Carlo draws are chunked; chunk ``i`` uses the ``i``-th child of
``SeedSequence(seed)`` with a Philox generator, so an estimate is fixed by
``(seed, n_samples, chunk)`` and chunks can be merged in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import (
    SystemParams,
    make_rng,
    sample_eta,
    sample_gamma_e,
    sample_gamma_e_mmse,
)
from .errors import DomainError
from .single_opt import DesignPoint, adaptive_conditional_throughput_array, p_success

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int | None = None

    @classmethod
    def from_samples(cls, x, seed=None) -> "McEstimate":
        x = np.asarray(x, dtype=float)
        n = x.size
        sd = float(x.std(ddof=1)) if n > 1 else 0.0
        return cls(float(x.mean()), sd / math.sqrt(n) if n else math.nan, n, seed)

    @property
    def _m2(self) -> float:
        # Sum of squared deviations recovered from the standard error.
        return self.stderr ** 2 * self.n_samples * (self.n_samples - 1)

    def merge(self, other: "McEstimate") -> "McEstimate":
        """Pooled estimate of two independent batches."""
        n = self.n_samples + other.n_samples
        d = other.mean - self.mean
        mean = self.mean + d * other.n_samples / n
        m2 = self._m2 + other._m2 + d * d * self.n_samples * other.n_samples / n
        return McEstimate(mean, math.sqrt(m2 / (n - 1) / n), n, self.seed)

    def within(self, value: float, k: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr + slack


def _chunked(n_samples: int, seed: int, chunk: int, draw: Callable[[np.random.Generator, int], np.ndarray]):
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    sizes = [chunk] * (n_samples // chunk)
    if n_samples % chunk:
        sizes.append(n_samples % chunk)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    est = None
    for ss, size in zip(children, sizes):
        part = McEstimate.from_samples(draw(make_rng(ss), size), seed)
        est = part if est is None else est.merge(part)
    return est


def mc_leakage(params: SystemParams, phi: float, n: float, R_e: float, n_samples: int = 10 ** 6,
               seed: int = 0, eve: str = "single", normalization: str = "literal",
               chunk: int = DEFAULT_CHUNK) -> McEstimate:
    """Sample mean of Eve's decoding success 1 - eps(gamma_e, n, R_e).

    ``eve="single"`` samples the single-antenna Eve; ``eve="mmse"`` samples
    an M_e-antenna MMSE receiver.
    """
    if eve not in ("single", "mmse"):
        raise DomainError(f"unknown eve model {eve!r}")

    def draw(rng, size):
        if eve == "single":
            g = sample_gamma_e(params, phi, size, rng)
        else:
            g = sample_gamma_e_mmse(params, phi, size, rng, normalization)
        return np.where(np.isinf(g), 1.0, p_success(np.where(np.isinf(g), 1.0, g), n, R_e))

    return _chunked(n_samples, seed, chunk, draw)


def mc_throughput(params: SystemParams, design: DesignPoint, mode: str = "nonadaptive",
                  n_samples: int = 10 ** 5, seed: int = 0, chunk: int = DEFAULT_CHUNK) -> McEstimate:
    """Sample mean of R_s(eta) p_s(eta) 1{eta > mu} with exact-Q decoding.

    ``mode="nonadaptive"`` keeps the design fixed (Bob's SNR is
    phi P_b eta). ``mode="adaptive"`` (single antenna) re-solves R_s for
    every sampled eta using ``design.R_e``.
    """
    if mode not in ("adaptive", "nonadaptive"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "adaptive" and params.M != 1:
        raise DomainError("adaptive Monte-Carlo throughput is implemented for M = 1")

    def draw(rng, size):
        eta = sample_eta(params, size, rng)
        if math.isinf(design.mu):
            return np.zeros(size)
        if mode == "adaptive":
            return adaptive_conditional_throughput_array(params, eta, design.R_e)
        g = design.phi * params.P_b * eta
        ps = p_success(g, design.n, design.R_t)
        return np.where(eta > design.mu, design.R_s * ps, 0.0)

    return _chunked(n_samples, seed, chunk, draw)


@dataclass(frozen=True)
class GridResult:
    argmax: tuple
    value: float
    steps: tuple


def grid_search(objective: Callable, bounds: Sequence[tuple], points: Sequence[int] | int,
                vectorized: bool = False) -> GridResult:
    """Exhaustive maximization over a 1-D or 2-D ``linspace`` box.

    Ties resolve to the smallest coordinates (first axis first). With
    ``vectorized=True`` the objective receives meshgrid arrays.
    """
    if len(bounds) not in (1, 2):
        raise DomainError("grid_search supports 1-D or 2-D boxes")
    if isinstance(points, int):
        points = [points] * len(bounds)
    axes = [np.linspace(lo, hi, k) for (lo, hi), k in zip(bounds, points)]
    mesh = np.meshgrid(*axes, indexing="ij")
    if vectorized:
        vals = np.asarray(objective(*mesh), dtype=float)
    else:
        vals = np.vectorize(lambda *x: float(objective(*x)))(*mesh)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    steps = tuple(float(a[1] - a[0]) if a.size > 1 else 0.0 for a in axes)
    return GridResult(tuple(float(a[i]) for a, i in zip(axes, idx)), float(vals[idx]), steps)


def fd_check(f: Callable[[float], float], df: Callable[[float], float], points, step: float = 1e-5,
             floor: float = 1e-12) -> float:
    """Largest relative gap between ``df`` and a central difference of ``f``.

    The step is scaled by max(1, |x|); the denominator is max(|fd|, floor).
    """
    worst = 0.0
    for x in np.atleast_1d(np.asarray(points, dtype=float)):
        h = step * max(1.0, abs(x))
        fd = (f(x + h) - f(x - h)) / (2.0 * h)
        err = abs(df(x) - fd) / max(abs(fd), floor)
        worst = max(worst, err)
    return worst
