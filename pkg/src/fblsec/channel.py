"""Scenario parameters, SINR algebra and fading distributions.

Conventions: ``P_b``/``P_e`` are transmit powers normalized by the receiver
noise variance, ``sigma_b2``/``sigma_e2`` are per-antenna channel variances,
and ``Gamma_b = P_b * sigma_b2``, ``Gamma_e = P_e * sigma_e2`` are the
average SNRs. All SNR-like quantities are linear.

Random numbers come from numpy's ``Philox`` counter-based bit generator, so
Monte-Carlo output is bit-reproducible for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .errors import DomainError
from .specfun import reg_upper_gamma


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Static scenario description.

    ``worst_case_eve`` drops Eve's receiver noise (Gamma_e -> infinity) in the
    multi-antenna artificial-noise model; it only affects M >= 2.
    """

    M: int = 1
    P_b: float = 1.0
    P_e: float = 1.0
    sigma_b2: float = 1.0
    sigma_e2: float = 1.0
    delta: float = 0.2
    N: int = 500
    M_e: int = 1
    worst_case_eve: bool = False

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"M must be an integer >= 1, got {self.M}")
        if int(self.M_e) != self.M_e or self.M_e < 1:
            raise DomainError(f"M_e must be an integer >= 1, got {self.M_e}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be an integer >= 1, got {self.N}")
        for name in ("P_b", "P_e", "sigma_b2", "sigma_e2"):
            v = getattr(self, name)
            if not v > 0:
                raise DomainError(f"{name} must be > 0, got {v}")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")

    @property
    def Gamma_b(self) -> float:
        return self.P_b * self.sigma_b2

    @property
    def Gamma_e(self) -> float:
        return self.P_e * self.sigma_e2

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @classmethod
    def from_snr(cls, Gamma_b=1.0, Gamma_e=1.0, P_b=1.0, P_e=1.0, **kw) -> "SystemParams":
        """Build from average SNRs, the way scenarios are usually quoted."""
        return cls(P_b=P_b, P_e=P_e, sigma_b2=Gamma_b / P_b, sigma_e2=Gamma_e / P_e, **kw)


@dataclass(frozen=True)
class ChannelSnapshot:
    """One realization of the main-channel power gain eta = ||h_b||^2."""

    eta: float
    h_b: np.ndarray | None = field(default=None, compare=False, repr=False)
    h_e: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.eta >= 0:
            raise DomainError(f"eta must be >= 0, got {self.eta}")

    def rho_b(self, params: SystemParams) -> float:
        return params.P_b * self.eta


@dataclass(frozen=True)
class AnAllocation:
    """Power split: ``phi`` on the beam direction, ``alpha`` of that on data."""

    phi: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("phi", "alpha"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")


def _check_phi(phi):
    if not 0.0 <= phi <= 1.0:
        raise DomainError(f"phi must lie in [0, 1], got {phi}")


def xi(params: SystemParams, phi: float) -> float:
    """AN-to-signal ratio (1/phi - 1) / (M - 1); zero when M = 1 or phi = 1."""
    if params.M == 1 or phi == 1.0:
        return 0.0
    if phi == 0.0:
        return math.inf
    return (1.0 / phi - 1.0) / (params.M - 1)


def kappa(x, alpha):
    """x alpha / (x (1 - alpha) + 1)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("kappa requires x >= 0")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    out = x * alpha / (x * (1.0 - alpha) + 1.0)
    return float(out) if out.ndim == 0 else out


def sinr_bob(params: SystemParams, snapshot: ChannelSnapshot, alloc: AnAllocation = AnAllocation()) -> float:
    """Bob's SINR; with M = 1 the allocation is ignored (no AN)."""
    if params.M == 1:
        return params.P_b * snapshot.eta
    a, phi = alloc.alpha, alloc.phi
    g = phi * params.P_b * snapshot.eta
    return a * g / ((1.0 - a) * g + 1.0)


def _alloc_phi(params, phi):
    return 1.0 if params.M == 1 else float(phi)


def cdf_gamma_b(params: SystemParams, phi: float, gamma):
    """CDF of Bob's beamformed SNR phi * P_b * eta (Erlang-M with scale phi*Gamma_b)."""
    phi = _alloc_phi(params, phi)
    _check_phi(phi)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma must be >= 0")
    if phi == 0.0:
        out = np.where(g > 0, 1.0, 0.0)
    else:
        out = 1.0 - reg_upper_gamma(params.M, g / (phi * params.Gamma_b))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def pdf_gamma_b(params: SystemParams, phi: float, gamma):
    phi = _alloc_phi(params, phi)
    _check_phi(phi)
    g = np.asarray(gamma, dtype=float)
    s = phi * params.Gamma_b
    M = params.M
    if M == 1:
        out = np.exp(-g / s) / s
    else:
        with np.errstate(divide="ignore"):
            logp = (M - 1) * np.log(g / s) - g / s - special.gammaln(M) - math.log(s)
        out = np.exp(logp)
    out = np.where(g < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def _eve_survival(params, phi, g):
    # P(gamma_e > g) for the single-antenna Eve, null-space AN, alpha = 1.
    if params.M == 1:
        return np.exp(-g / params.Gamma_e)
    if phi == 0.0:
        return np.where(g > 0, 0.0, 1.0)
    x = xi(params, phi)
    tail = np.power(1.0 + x * g, 1.0 - params.M)
    if params.worst_case_eve:
        if phi == 1.0:
            return np.ones_like(g)
        return tail
    return np.exp(-g / (phi * params.Gamma_e)) * tail


def cdf_gamma_e(params: SystemParams, phi: float, gamma):
    """CDF of a single-antenna Eve's SINR under null-space AN (alpha = 1)."""
    phi = _alloc_phi(params, phi)
    _check_phi(phi)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("gamma must be >= 0")
    out = 1.0 - _eve_survival(params, phi, g)
    return float(out) if np.ndim(out) == 0 else out


def pdf_gamma_e(params: SystemParams, phi: float, gamma):
    """Density matching :func:`cdf_gamma_e`."""
    phi = _alloc_phi(params, phi)
    _check_phi(phi)
    g = np.asarray(gamma, dtype=float)
    M = params.M
    if M == 1:
        out = np.exp(-g / params.Gamma_e) / params.Gamma_e
    elif phi == 0.0:
        out = np.zeros_like(g)
    else:
        x = xi(params, phi)
        base = 1.0 + x * g
        an_term = x * (M - 1) * np.power(base, -M)
        if params.worst_case_eve:
            out = an_term if phi < 1.0 else np.zeros_like(g)
        else:
            noise_term = np.power(base, 1.0 - M) / (phi * params.Gamma_e)
            out = (noise_term + an_term) * np.exp(-g / (phi * params.Gamma_e))
    out = np.where(g < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def cdf_gamma_e_multi(params: SystemParams, phi: float, gamma, normalization: str = "literal"):
    """CDF of an M_e-antenna MMSE Eve's SINR under null-space AN.

    ``normalization="literal"`` uses ``P_e`` as the per-stream SNR scale
    (equivalently sigma_e2 = 1); ``"gamma_e"`` uses ``Gamma_e = P_e sigma_e2``.
    ``P_e = inf`` is the noise-free limit.
    """
    phi = _alloc_phi(params, phi)
    _check_phi(phi)
    if normalization == "literal":
        scale = params.P_e
    elif normalization == "gamma_e":
        scale = params.Gamma_e
    else:
        raise DomainError(f"unknown normalization {normalization!r}")
    x = np.asarray(gamma, dtype=float)
    if np.any(x < 0):
        raise DomainError("gamma must be >= 0")
    if phi == 0.0:
        out = np.where(x > 0, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out
    M, Me = params.M, params.M_e
    L = M - 1  # number of AN streams seen as interferers
    xq = xi(params, phi) * x
    if math.isinf(scale):
        s = np.zeros_like(x)
    else:
        s = x / (phi * scale)
    total = np.zeros_like(x)
    for n in range(1, Me + 1):
        if L == 0 or Me >= L + n:
            A = np.ones_like(x)
        else:
            A = sum(math.comb(L, m) * xq ** m for m in range(0, Me - n + 1)) / (1.0 + xq) ** L
        if n == 1:
            total = total + A
        else:
            total = total + A * s ** (n - 1) / math.factorial(n - 1)
    out = 1.0 - np.exp(-s) * total
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    """Philox-backed generator; ``seed`` may be an int or a SeedSequence."""
    return np.random.Generator(np.random.Philox(seed))


def complex_gaussian(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """i.i.d. CN(0, variance) entries."""
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_snapshot(params: SystemParams, rng_seed) -> ChannelSnapshot:
    """Draw h_b (length M) and h_e (M_e x M) and return the snapshot."""
    rng = make_rng(rng_seed)
    h_b = complex_gaussian(rng, params.M, params.sigma_b2)
    h_e = complex_gaussian(rng, (params.M_e, params.M), params.sigma_e2)
    if params.M_e == 1:
        h_e = h_e[0]
    eta = float(np.sum(np.abs(h_b) ** 2))
    return ChannelSnapshot(eta=eta, h_b=h_b, h_e=h_e)


def sample_eta(params: SystemParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. draws of ||h_b||^2 built from complex Gaussian entries."""
    h = complex_gaussian(rng, (size, params.M), params.sigma_b2)
    return np.sum(h.real ** 2 + h.imag ** 2, axis=1)


def sample_gamma_e(params: SystemParams, phi: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Eve's SINR for a single-antenna Eve, alpha = 1, null-space AN.

    By rotational invariance of h_e, its projections on the beam direction
    and on the null space of h_b are distributed as the first and remaining
    coordinates of h_e in a fixed basis.
    """
    phi = _alloc_phi(params, phi)
    h = complex_gaussian(rng, (size, params.M), params.sigma_e2)
    p = h.real ** 2 + h.imag ** 2
    sig = p[:, 0]
    if params.M == 1:
        return params.P_e * sig
    an = p[:, 1:].sum(axis=1)
    if params.worst_case_eve:
        with np.errstate(divide="ignore"):
            return phi * sig / ((1.0 - phi) * an / (params.M - 1))
    return phi * params.P_e * sig / ((1.0 - phi) * params.P_e * an / (params.M - 1) + 1.0)


def sample_gamma_e_mmse(params: SystemParams, phi: float, size: int, rng: np.random.Generator,
                        normalization: str = "literal") -> np.ndarray:
    """MMSE SINR of an M_e-antenna Eve facing M - 1 null-space AN streams.

    gamma = phi P g^H (I + c G G^H)^{-1} g with g ~ CN(0, I_{M_e}),
    G ~ CN(0, 1)^{M_e x (M-1)}, c = (1 - phi) P / (M - 1).
    """
    phi = _alloc_phi(params, phi)
    P = params.P_e if normalization == "literal" else params.Gamma_e
    Me, L = params.M_e, params.M - 1
    g = complex_gaussian(rng, (size, Me, 1), 1.0)
    if L == 0:
        return phi * P * np.sum(np.abs(g[..., 0]) ** 2, axis=1)
    G = complex_gaussian(rng, (size, Me, L), 1.0)
    c = (1.0 - phi) * P / L
    R = np.eye(Me)[None] + c * G @ np.conj(np.swapaxes(G, 1, 2))
    sol = np.linalg.solve(R, g)
    quad = np.real(np.conj(np.swapaxes(g, 1, 2)) @ sol)[:, 0, 0]
    return phi * P * quad
