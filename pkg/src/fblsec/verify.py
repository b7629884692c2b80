"""Verification suite: structural properties and oracle comparisons.

Each ``check_*`` function returns a :class:`CheckResult` whose parts carry
the individual measurements. ``level="full"`` uses the acceptance
settings; ``level="quick"`` trims random draws and sample sizes so the whole
suite runs in well under a minute. Everything is deterministic in ``seed``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnapshot, SystemParams, db_to_linear
from .leakage import LeakageModel, drho_e_dphi, invert_redundancy, leakage, leakage_exact, rho_e, worst_case_lambda
from .multi_opt import (
    L_function,
    X_function,
    adaptive_phi_opt,
    ao_optimize,
    dL_dphi,
    dX_drho_b,
    high_snr_approx,
    lambda_pair,
    leakage_multi_eve,
    multi_threshold,
    nonadaptive_dT_dphi_multi,
    nonadaptive_dT_dRs_multi,
    nonadaptive_mu_multi,
    nonadaptive_opt_multi,
    nonadaptive_throughput_multi,
    rho_b_circ,
)
from .oracle import fd_check, grid_search, mc_leakage, mc_throughput
from .single_opt import (
    DesignPoint,
    adaptive_conditional_opt,
    conditional_throughput,
    conditional_throughput_drs,
    nonadaptive_G,
    nonadaptive_dT_dtheta,
    nonadaptive_opt,
    nonadaptive_rs_approx,
    nonadaptive_throughput,
    nonadaptive_throughput_theta,
    rs_lower_bound,
)
from .specfun import capacity, dispersion, q_function

DEFAULT_SEED = 12345
LEVELS = ("quick", "full")
BLOCKLENGTHS = (100, 200, 500, 1000, 2000)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class CheckResult:
    """``passed`` iff measured <= bound (or, with parts, iff every part passed)."""

    name: str
    passed: bool
    measured: float
    bound: float
    parts: tuple = ()
    seconds: float = 0.0

    @classmethod
    def leq(cls, name, measured, bound):
        measured = float(measured)
        return cls(name, bool(measured <= bound), measured, float(bound))

    @classmethod
    def combine(cls, name, parts, seconds=0.0):
        # Measured: number of failed parts.
        failed = sum(not p.passed for p in parts)
        return cls(name, failed == 0, float(failed), 0.0, tuple(parts), seconds)


def _check_level(level):
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    return level == "full"


def _rng(seed, tag):
    return np.random.default_rng([seed, tag])


def _db(x):
    return float(db_to_linear(x))


def _max_increase(values):
    """Largest v[i] - v[i+1] (amount a sequence fails to be nondecreasing)."""
    v = np.asarray(values, dtype=float)
    return float(np.max(v[:-1] - v[1:])) if v.size > 1 else -math.inf


# ---------------------------------------------------------------------------
# 1. Rate redundancy decreases with blocklength
# ---------------------------------------------------------------------------

def check_redundancy_monotone(level="full", seed=DEFAULT_SEED) -> CheckResult:
    worst = -math.inf
    for Ge_db in (0.0, 5.0):
        for delta in (0.1, 0.2, 0.4):
            p = SystemParams.from_snr(Gamma_e=_db(Ge_db), delta=delta)
            r = [invert_redundancy(p, 1.0, n, delta) for n in BLOCKLENGTHS]
            worst = max(worst, float(np.max(np.diff(r))))
    return CheckResult.leq("redundancy_decreasing_in_n", worst, -1e-8)


# ---------------------------------------------------------------------------
# 2. Throughput nondecreasing in blocklength
# ---------------------------------------------------------------------------

def _draw_single(rng):
    return SystemParams.from_snr(Gamma_b=_db(rng.uniform(0, 20)), Gamma_e=_db(rng.uniform(-5, 5)),
                                 delta=float(rng.uniform(0.05, 0.5)))


def _draw_multi(rng, worst_case=False):
    return SystemParams.from_snr(Gamma_b=_db(rng.uniform(0, 10)), Gamma_e=_db(rng.uniform(-5, 10)),
                                 M=int(rng.integers(2, 9)), delta=float(rng.uniform(0.05, 0.5)),
                                 worst_case_eve=worst_case)


def check_throughput_monotone_n(level="full", seed=DEFAULT_SEED) -> CheckResult:
    draws = 10 if _check_level(level) else 3
    rng = _rng(seed, 2)
    ad, na, mu = -math.inf, -math.inf, -math.inf
    for _ in range(draws):
        p = _draw_single(rng)
        snap = ChannelSnapshot(eta=_db(rng.uniform(0, 20)))
        ad = max(ad, _max_increase([adaptive_conditional_opt(p.with_(N=n), snap).throughput for n in BLOCKLENGTHS]))
        p = _draw_single(rng)
        R_s = float(rng.uniform(0.1, 2.0))
        fixed = [nonadaptive_throughput(p, R_s, n) for n in BLOCKLENGTHS]
        best = [nonadaptive_opt(p.with_(N=n)).throughput for n in BLOCKLENGTHS]
        na = max(na, _max_increase(fixed), _max_increase(best))
        p = _draw_multi(rng)
        snap = ChannelSnapshot(eta=multi_threshold(p) * _db(rng.uniform(-3, 20)))
        mu = max(mu, _max_increase([ao_optimize(p.with_(N=n), snap)[0].throughput for n in BLOCKLENGTHS]))
    return CheckResult.combine("throughput_nondecreasing_in_n", [
        CheckResult.leq("adaptive_single", ad, 1e-9),
        CheckResult.leq("nonadaptive_single", na, 1e-9),
        CheckResult.leq("adaptive_multi", mu, 1e-9),
    ])


# ---------------------------------------------------------------------------
# 3. Shape: concavity and single sign change
# ---------------------------------------------------------------------------

def check_shape(level="full", seed=DEFAULT_SEED) -> CheckResult:
    configs = 20 if _check_level(level) else 5
    rng = _rng(seed, 3)
    conc, sign_err, lconc = -math.inf, 0, -math.inf
    for _ in range(configs):
        # Conditional throughput in R_s on [0, C_b - R_e].
        while True:
            g = _db(rng.uniform(0, 25))
            R_e = float(rng.uniform(0.1, 2.0))
            if capacity(g) > R_e + 1e-3:
                break
        N = int(rng.integers(100, 2001))
        C_b, V_b = capacity(g), dispersion(g)
        T = conditional_throughput(np.linspace(0.0, C_b - R_e, 2001), C_b, V_b, R_e, N)
        conc = max(conc, float(np.max(np.diff(T, 2))))

        # Sign of dT_N/dtheta: G from its positive start at theta_0 to deep in the tail.
        Gb = _db(rng.uniform(-5, 25))
        R_e = float(rng.uniform(0.1, 2.0))
        n = int(rng.integers(100, 2001))
        t0 = math.sqrt(math.expm1(R_e * LN2))
        theta = np.linspace(t0, math.sqrt(t0 * t0 + 30.0 * Gb), 4001)
        s = np.sign(nonadaptive_G(theta, R_e, n, Gb))
        sign_err = max(sign_err, abs(int(np.count_nonzero(s[1:] != s[:-1])) - 1))

        # L(phi) with transmission on (eta above the on-off threshold).
        p = _draw_multi(rng, worst_case=bool(rng.integers(0, 2)))
        snap = ChannelSnapshot(eta=multi_threshold(p) * _db(rng.uniform(0.1, 20)))
        R_s = float(rng.uniform(0.0, 2.0))
        L = [L_function(p, snap, f, R_s) for f in np.linspace(1e-3, 0.999, 999)]
        lconc = max(lconc, float(np.max(np.diff(L, 2))))
    return CheckResult.combine("concavity_and_sign_shape", [
        CheckResult.leq("conditional_throughput_concave_rs", conc, 1e-9),
        CheckResult.leq("G_single_sign_change", sign_err, 0),
        CheckResult.leq("L_concave_phi", lconc, 1e-9),
    ])


# ---------------------------------------------------------------------------
# 4. Optimizers vs exhaustive search
# ---------------------------------------------------------------------------

STEP_1D, STEP_2D, GAP = 1e-3, 5e-3, 1e-4


def _grid(lo, hi, step):
    return max(2, int(round((hi - lo) / step)) + 1)


def _compare(name, x_opt, f_opt, res: "GridResult", step):
    dx = max(abs(a - b) for a, b in zip(x_opt, res.argmax))
    return [CheckResult.leq(f"{name}.argmax_distance", dx, step + 1e-12),
            CheckResult.leq(f"{name}.objective_gap", abs(f_opt - res.value), GAP)]


def _fig2_cases(full):
    base = SystemParams.from_snr(Gamma_e=1.0, delta=0.2)
    Ns = (100, 500, 1000) if full else (500,)
    return [(base.with_(N=N), _db(e)) for N in Ns for e in (5.0, 10.0)]


def _fig3_cases(full):
    Ns = (100, 500, 1000) if full else (500,)
    return [SystemParams.from_snr(Gamma_b=_db(s), Gamma_e=1.0, delta=0.2, N=N)
            for N in Ns for s in (0.0, 10.0, 20.0)]


def _fig6_cases(full):
    base = SystemParams.from_snr(Gamma_e=1.0, M=4, delta=0.2)
    Ns = (100, 1000) if full else (500,)
    return [(base.with_(N=N), _db(e)) for N in Ns for e in (5.0, 10.0)]


def _fig7_cases(full):
    base = SystemParams.from_snr(Gamma_b=_db(3.0), Gamma_e=1.0, M=4)
    if not full:
        return [base.with_(N=500, delta=0.2)]
    return [base.with_(N=N, delta=d) for N in (100, 1000) for d in (0.1, 0.2)]


def _ao_objective(p, snap):
    def T(phi, R_s):
        out = np.zeros_like(R_s)
        for i in range(phi.shape[0]):
            f = float(phi[i, 0])
            lb, le = lambda_pair(p, snap, f)
            if lb <= 1.0:
                continue
            arg = math.sqrt(p.N) * lb * (math.log(lb / le) - R_s[i] * LN2) / math.sqrt((lb - 1.0) * (lb + 1.0))
            out[i] = R_s[i] * (1.0 - q_function(arg))
        return out
    return T


def _na_objective(p):
    def T(phi, R_s):
        return np.array([nonadaptive_throughput_multi(p, float(phi[i, 0]), R_s[i]) for i in range(phi.shape[0])])
    return T


def check_optimizers(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    parts = []
    for p, eta in _fig2_cases(full):
        dp = adaptive_conditional_opt(p, ChannelSnapshot(eta=eta))
        g = p.P_b * eta
        C_b, V_b = capacity(g), dispersion(g)
        hi = C_b - dp.R_e
        res = grid_search(lambda r: conditional_throughput(r, C_b, V_b, dp.R_e, p.N), [(0.0, hi)],
                          _grid(0.0, hi, STEP_1D), vectorized=True)
        parts += _compare(f"adaptive_single[N={p.N},eta={eta:.4g}]", (dp.R_s,), dp.throughput, res, res.steps[0])
    for p in _fig3_cases(full):
        dp = nonadaptive_opt(p)
        t0 = math.sqrt(math.expm1(dp.R_e * LN2))
        hi = math.sqrt(t0 * t0 + 10.0 * p.Gamma_b)
        res = grid_search(lambda t: nonadaptive_throughput_theta(t, dp.R_e, p.N, p.Gamma_b), [(t0, hi)],
                          _grid(t0, hi, STEP_1D), vectorized=True)
        parts += _compare(f"nonadaptive_single[N={p.N},Gb={p.Gamma_b:.4g}]", (dp.diagnostics["theta_b"],),
                          dp.throughput, res, res.steps[0])
    for p, eta in _fig6_cases(full):
        snap = ChannelSnapshot(eta=eta)
        for R_s in (0.5, 1.0):
            phi = adaptive_phi_opt(p, snap, R_s)
            res = grid_search(lambda f: L_function(p, snap, f, R_s), [(0.0, 1.0)], _grid(0.0, 1.0, STEP_1D))
            parts += _compare(f"adaptive_multi_phi[N={p.N},eta={eta:.4g},R_s={R_s}]", (phi,),
                              L_function(p, snap, phi, R_s), res, res.steps[0])
        dp, _ = ao_optimize(p, snap)
        hi = math.log2(1.0 + snap.rho_b(p))
        res = grid_search(_ao_objective(p, snap), [(0.0, 1.0), (0.0, hi)],
                          [_grid(0.0, 1.0, STEP_2D), _grid(0.0, hi, STEP_2D)], vectorized=True)
        parts += _compare(f"ao_joint[N={p.N},eta={eta:.4g}]", (dp.phi, dp.R_s), dp.throughput, res,
                          max(res.steps))
    for p in _fig7_cases(full):
        dp, _ = nonadaptive_opt_multi(p)
        res = grid_search(_na_objective(p), [(STEP_2D, 1.0), (0.0, 4.0)],
                          [_grid(STEP_2D, 1.0, STEP_2D), _grid(0.0, 4.0, STEP_2D)], vectorized=True)
        parts += _compare(f"nonadaptive_multi_joint[N={p.N},delta={p.delta}]", (dp.phi, dp.R_s), dp.throughput,
                          res, max(res.steps))
    return CheckResult.combine("optimizers_match_grid_search", parts)


# ---------------------------------------------------------------------------
# 5. Monte-Carlo validation
# ---------------------------------------------------------------------------

MODEL_GAP = 0.02


def _mc_ratio(name, est, value, slack=0.0):
    # |mean - formula| in units of the allowed deviation; passes when <= 1.
    return CheckResult.leq(name, abs(est.mean - value) / (3.0 * est.stderr + slack), 1.0)


def check_monte_carlo(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    configs = 20 if full else 4
    n_leak = 10 ** 6 if full else 10 ** 5
    n_thr = 2 * 10 ** 5 if full else 5 * 10 ** 4
    rng = _rng(seed, 5)
    mc_seeds = np.random.SeedSequence([seed, 5]).generate_state(2 * configs)
    parts = []
    for i in range(configs):
        M = int(rng.choice([1, 2, 4]))
        p = SystemParams.from_snr(Gamma_e=_db(rng.uniform(-5, 5)), M=M)
        phi = 1.0 if M == 1 else float(rng.uniform(0.2, 1.0))
        n = int(rng.choice([100, 500, 1000]))
        R_e = float(rng.uniform(0.3, 2.5))
        est = mc_leakage(p, phi, n, R_e, n_samples=n_leak, seed=int(mc_seeds[2 * i]))
        parts.append(_mc_ratio(f"leakage[{i}:M={M},phi={phi:.3g},n={n},R_e={R_e:.3g}]", est,
                               leakage_exact(p, phi, n, R_e)))

        N = int(rng.choice([100, 500, 1000]))
        R_s = float(rng.uniform(0.2, 1.5))
        if i % 2 == 0:
            p = SystemParams.from_snr(Gamma_b=_db(rng.uniform(0, 15)), Gamma_e=_db(rng.uniform(-5, 5)),
                                      delta=float(rng.uniform(0.05, 0.5)), N=N)
            R_e = invert_redundancy(p, 1.0, N, p.delta)
            value = float(nonadaptive_throughput(p, R_s))
            design = DesignPoint(mu=math.expm1((R_s + R_e) * LN2) / p.P_b, n=N, R_s=R_s, R_e=R_e, throughput=value)
            label = "single"
        else:
            p = SystemParams.from_snr(Gamma_b=_db(rng.uniform(0, 10)), Gamma_e=_db(rng.uniform(-5, 5)),
                                      M=int(rng.choice([2, 4])), delta=float(rng.uniform(0.05, 0.5)), N=N)
            phi = float(rng.uniform(0.3, 1.0))
            R_e = math.log2(1.0 + phi * rho_e(p, phi))
            value = nonadaptive_throughput_multi(p, phi, R_s)
            design = DesignPoint(mu=nonadaptive_mu_multi(p, phi, R_s), n=N, R_s=R_s, R_e=R_e, throughput=value,
                                 phi=phi)
            label = f"multi,M={p.M}"
        est = mc_throughput(p, design, "nonadaptive", n_samples=n_thr, seed=int(mc_seeds[2 * i + 1]))
        parts.append(_mc_ratio(f"nonadaptive_throughput[{i}:{label},N={N},R_s={R_s:.3g}]", est, value, MODEL_GAP))
    return CheckResult.combine("monte_carlo_agreement", parts)


# ---------------------------------------------------------------------------
# 6. Monotone behaviour of the optimal designs
# ---------------------------------------------------------------------------

def _feasible_phi(p, eta, R_s=1.0):
    snap = ChannelSnapshot(eta=eta)
    if eta <= multi_threshold(p):
        return None
    phi = adaptive_phi_opt(p, snap, R_s)
    return phi if L_function(p, snap, phi, R_s) > 0.0 else None


def check_design_monotone(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    Ns = (100, 500, 1000) if full else (500,)
    deltas = (0.1, 0.2, 0.4) if full else (0.2,)
    lb_gap, ad_viol, na_viol = -math.inf, -math.inf, -math.inf
    for N in Ns:
        for delta in deltas:
            for Ge_db in (0.0, 5.0):
                p = SystemParams.from_snr(Gamma_e=_db(Ge_db), delta=delta, N=N)
                R_e = invert_redundancy(p, 1.0, N, delta)
                rs = []
                for eta in np.geomspace(0.5, 1e3, 120 if full else 40):
                    snap = ChannelSnapshot(eta=float(eta))
                    dp = adaptive_conditional_opt(p, snap, R_e_star=R_e)
                    lb_gap = max(lb_gap, rs_lower_bound(p, snap, R_e) - dp.R_s)
                    rs.append(dp.R_s)
                ad_viol = max(ad_viol, _max_increase(rs))
                sig = np.linspace(-5.0, 30.0, 71 if full else 15)
                na_viol = max(na_viol, _max_increase([nonadaptive_opt(p.with_(sigma_b2=_db(s))).R_s for s in sig]))

    eta_viol, delta_viol, lim_err, one_err = -math.inf, -math.inf, 0.0, 0.0
    Ms = (2, 4, 8) if full else (4,)
    for M in Ms:
        for delta in (0.1, 0.2, 0.5):
            p = SystemParams(M=M, delta=delta, worst_case_eve=True)
            phis = [f for f in (_feasible_phi(p, float(e)) for e in np.geomspace(1.0, 1e6, 60)) if f is not None]
            eta_viol = max(eta_viol, _max_increase(phis))
            lim = 1.0 / (math.sqrt(worst_case_lambda(M, delta)) + 1.0)
            lim_err = max(lim_err, abs(ao_optimize(p, ChannelSnapshot(eta=1e6))[0].phi - lim))
        p = SystemParams(M=M, worst_case_eve=True)
        phis = [f for f in (_feasible_phi(p.with_(delta=float(d)), 10.0) for d in np.linspace(0.05, 0.95, 37))
                if f is not None]
        delta_viol = max(delta_viol, _max_increase(phis))
        one_err = max(one_err, abs(1.0 - adaptive_phi_opt(p.with_(delta=1.0 - 1e-8), ChannelSnapshot(eta=10.0), 1.0)))
    return CheckResult.combine("optimal_design_monotone", [
        CheckResult.leq("lower_bound_below_rs_opt", lb_gap, 0.0),
        CheckResult.leq("adaptive_rs_nondecreasing_in_eta", ad_viol, 1e-9),
        CheckResult.leq("nonadaptive_rs_nondecreasing_in_sigma_b2", na_viol, 1e-9),
        CheckResult.leq("worst_case_phi_nondecreasing_in_eta", eta_viol, 1e-9),
        CheckResult.leq("worst_case_phi_nondecreasing_in_delta", delta_viol, 1e-9),
        CheckResult.leq("worst_case_phi_high_eta_limit", lim_err, 1e-3),
        CheckResult.leq("worst_case_phi_delta_to_one", one_err, 1e-3),
    ])


# ---------------------------------------------------------------------------
# 7. Asymptotic approximations
# ---------------------------------------------------------------------------

def check_asymptotics(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    worst_ratio = 0.0
    for N in (100, 500, 1000) if full else (500,):
        p = SystemParams.from_snr(Gamma_b=_db(20.0), Gamma_e=1.0, delta=0.2, N=N)
        R_a, _ = nonadaptive_rs_approx(p)
        worst_ratio = max(worst_ratio, 1.0 - float(nonadaptive_throughput(p, R_a)) / nonadaptive_opt(p).throughput)

    base = SystemParams.from_snr(Gamma_e=1.0, M=4, delta=0.2, N=500, worst_case_eve=True)
    p30 = base.with_(sigma_b2=_db(30.0))
    dp, _ = nonadaptive_opt_multi(p30)
    rel = abs(high_snr_approx(p30).throughput(dp.phi, dp.R_s) - dp.throughput) / dp.throughput
    p40 = base.with_(sigma_b2=_db(40.0))
    phi_err = abs(nonadaptive_opt_multi(p40)[0].phi - high_snr_approx(p40).phi)
    return CheckResult.combine("high_snr_asymptotics", [
        CheckResult.leq("approx_rate_throughput_loss_20dB", worst_ratio, 0.01),
        CheckResult.leq("high_snr_throughput_rel_error_30dB", rel, 0.05),
        CheckResult.leq("closed_form_phi_40dB", phi_err, 1e-3),
    ])


# ---------------------------------------------------------------------------
# 8. Asymptotic vs exact leakage
# ---------------------------------------------------------------------------

def check_leakage_asymptotic(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    phis = np.linspace(0.05, 0.95, 19 if full else 7)
    worst = 0.0
    for M in (2, 4):
        for n in (200, 1000):
            for Ge_db in (0.0, 5.0):
                p = SystemParams.from_snr(Gamma_e=_db(Ge_db), M=M)
                for R_e in (0.5, 1.0, 2.0) if full else (1.0,):
                    for f in phis:
                        f = float(f)
                        gap = abs(leakage_exact(p, f, n, R_e) - leakage(p, f, n, R_e, LeakageModel.ASYMPTOTIC))
                        worst = max(worst, gap)
    return CheckResult.leq("leakage_asymptotic_vs_exact", worst, 0.02)


# ---------------------------------------------------------------------------
# 9. Multi-antenna Eve defeats null-space AN
# ---------------------------------------------------------------------------

def check_multi_eve(level="full", seed=DEFAULT_SEED) -> CheckResult:
    full = _check_level(level)
    p = SystemParams(M=4, M_e=4, P_e=1e12)
    lowest = 1.0
    for R_e in np.geomspace(1e-3, 10.0, 40 if full else 10):
        for phi in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
            for n in (100, 1000):
                lowest = min(lowest, leakage_multi_eve(p, phi, n, float(R_e)))
    return CheckResult.leq("multi_antenna_eve_leakage_deficit", 1.0 - lowest, 1e-6)


# ---------------------------------------------------------------------------
# 10. Derivative audit
# ---------------------------------------------------------------------------

FD_TOL = 1e-5


def check_derivatives(level="full", seed=DEFAULT_SEED) -> CheckResult:
    points = 50 if _check_level(level) else 10
    rng = _rng(seed, 10)
    worst = {k: 0.0 for k in ("conditional_throughput_drs", "nonadaptive_dT_dtheta", "dL_dphi", "dX_drho_b",
                               "nonadaptive_dT_dphi_multi", "nonadaptive_dT_dRs_multi", "drho_e_dphi")}

    def upd(key, f, df, x):
        worst[key] = max(worst[key], fd_check(f, df, [x]))

    for _ in range(points):
        g = _db(rng.uniform(5, 25))
        R_e = float(rng.uniform(0.1, 1.0))
        N = int(rng.integers(100, 2001))
        C_b, V_b = capacity(g), dispersion(g)
        upd("conditional_throughput_drs", lambda r: conditional_throughput(r, C_b, V_b, R_e, N),
            lambda r: conditional_throughput_drs(r, C_b, V_b, R_e, N), rng.uniform(0.05, C_b - R_e))

        Gb = _db(rng.uniform(0, 20))
        t0 = math.sqrt(math.expm1(R_e * LN2))
        upd("nonadaptive_dT_dtheta", lambda t: nonadaptive_throughput_theta(t, R_e, N, Gb),
            lambda t: nonadaptive_dT_dtheta(t, R_e, N, Gb), t0 + rng.uniform(0.05, 3.0) * math.sqrt(Gb))

        p = _draw_multi(rng, worst_case=bool(rng.integers(0, 2)))
        snap = ChannelSnapshot(eta=_db(rng.uniform(0, 20)))
        R_s = float(rng.uniform(0.0, 2.0))
        upd("dL_dphi", lambda f: L_function(p, snap, f, R_s), lambda f: dL_dphi(p, snap, f, R_s),
            rng.uniform(0.05, 0.95))
        upd("drho_e_dphi", lambda f: rho_e(p, f), lambda f: drho_e_dphi(p, f), rng.uniform(0.05, 0.95))

        pf = p.with_(worst_case_eve=False)
        r0 = rho_b_circ(pf, R_s)
        r0 = math.expm1(math.log1p(rho_e(pf, 1.0)) + R_s * LN2) if math.isinf(r0) else r0
        upd("dX_drho_b", lambda r: X_function(pf, r, R_s), lambda r: dX_drho_b(pf, r, R_s),
            r0 + rng.uniform(0.0, 20.0))

        # Skip saturated points (pbar within 1e-4 of 0 or 1): the slope is
        # then below the finite-difference noise floor.
        while True:
            phi = float(rng.uniform(0.1, 0.95))
            R_s = float(rng.uniform(0.1, 2.0))
            pbar = nonadaptive_throughput_multi(p, phi, R_s) / R_s
            if 1e-4 < pbar < 1.0 - 1e-4:
                break
            p = _draw_multi(rng, worst_case=bool(rng.integers(0, 2)))
        upd("nonadaptive_dT_dphi_multi", lambda f: nonadaptive_throughput_multi(p, f, R_s),
            lambda f: nonadaptive_dT_dphi_multi(p, f, R_s), phi)
        upd("nonadaptive_dT_dRs_multi", lambda r: nonadaptive_throughput_multi(p, phi, r),
            lambda r: nonadaptive_dT_dRs_multi(p, phi, r), R_s)
    return CheckResult.combine("derivative_audit", [CheckResult.leq(k, v, FD_TOL) for k, v in worst.items()])


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

CHECKS = (
    check_redundancy_monotone,
    check_throughput_monotone_n,
    check_shape,
    check_optimizers,
    check_monte_carlo,
    check_design_monotone,
    check_asymptotics,
    check_leakage_asymptotic,
    check_multi_eve,
    check_derivatives,
)


def timed(check, level="full", seed=DEFAULT_SEED) -> CheckResult:
    t0 = time.perf_counter()
    r = check(level, seed)
    return CheckResult(r.name, r.passed, r.measured, r.bound, r.parts, time.perf_counter() - t0)


def run_checks(level="quick", seed=DEFAULT_SEED) -> list:
    return [timed(c, level, seed) for c in CHECKS]


def report_rows(results):
    """Flat rows (name, status, measured, bound): each check then its parts."""
    rows = []
    for r in results:
        rows.append([r.name, "PASS" if r.passed else "FAIL", r.measured, r.bound])
        for part in r.parts:
            rows.append([f"{r.name}.{part.name}", "PASS" if part.passed else "FAIL", part.measured, part.bound])
    return rows
