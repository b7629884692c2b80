"""``fblsec`` command line: compute, optimize, sweep and verify.

Every command reads a scenario (``--config`` and/or ``--preset``) and writes
CSV to ``--out`` or stdout. Sweep axes in the scenario expand into one row
per grid point (Cartesian product, first axis slowest); compute and optimize
honour them too.

Exit codes: 0 success, 2 validation error, 3 numeric failure or
infeasible scenario, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channel import AnAllocation, ChannelSnapshot, sinr_bob
from .config import ConfigError, ScenarioConfig, load_config
from .errors import DomainError, FblsecError
from .leakage import LeakageModel, invert_redundancy, leakage, leakage_exact, leakage_piecewise
from .multi_opt import (
    adaptive_expected_throughput_multi,
    adaptive_phi_opt,
    adaptive_rs_opt,
    ao_optimize,
    multi_threshold,
    nonadaptive_opt_multi,
    nonadaptive_phi_opt_multi,
    nonadaptive_rs_opt_multi,
    nonadaptive_throughput_multi,
    ps_multi,
)
from .single_opt import (
    adaptive_conditional_opt,
    adaptive_expected_throughput,
    adaptive_on_off_threshold,
    nonadaptive_opt,
    nonadaptive_throughput,
    p_success,
)
from .specfun import decoding_error

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4
LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Row evaluators: ScenarioConfig -> dict (column -> value)
# ---------------------------------------------------------------------------

OPTIMIZED_AXES = ("R_s", "R_e", "phi", "n")


def _eta(c: ScenarioConfig) -> float:
    # Default: the mean channel gain M sigma_b^2.
    return c.params.M * c.params.sigma_b2 if c.eta is None else c.eta


def _phi(c: ScenarioConfig) -> float:
    if c.params.M == 1:
        return 1.0
    if c.phi is not None:
        return c.phi
    if c.params.worst_case_eve:
        raise ConfigError("phi", "required when worst_case_eve is set (phi = 1 leaks with probability 1)")
    return 1.0


def row_compute(c: ScenarioConfig) -> dict:
    """Decoding error, leakage, success probability and throughput of a fixed design."""
    p = c.params
    eta, phi = _eta(c), _phi(c)
    n = p.N if c.n is None else c.n
    R_s = 1.0 if c.R_s is None else c.R_s
    R_e = invert_redundancy(p, phi, n, p.delta, c.leakage_model) if c.R_e is None else c.R_e
    gamma_b = sinr_bob(p, ChannelSnapshot(eta=eta), AnAllocation(phi=phi))
    mu = math.expm1(R_e * LN2) / (phi * p.P_b)
    eps = float(decoding_error(gamma_b, n, R_s + R_e)) if gamma_b > 0 else 1.0
    ps = p_success(gamma_b, n, R_s + R_e)
    return {
        "eta": eta, "n": n, "R_s": R_s, "R_e": R_e, "phi": phi, "mu": mu, "eps": eps,
        "Oe": leakage(p, phi, n, R_e, c.leakage_model), "ps": ps,
        "throughput": R_s * ps if eta > mu else 0.0,
    }


def _design_row(dp, eta=None) -> dict:
    row = {} if eta is None else {"eta": eta}
    row.update(mu=dp.mu, n=dp.n, R_s=dp.R_s, R_e=dp.R_e, phi=dp.phi, alpha=dp.alpha,
               throughput=dp.throughput)
    row.update(dp.diagnostics)
    return row


def row_optimize(c: ScenarioConfig) -> dict:
    """Optimal design for the scheme; adaptive schemes optimize at ``eta``."""
    p = c.params
    if c.scheme == "single-adaptive":
        eta = _eta(c)
        return _design_row(adaptive_conditional_opt(p, ChannelSnapshot(eta=eta), c.leakage_model), eta)
    if c.scheme == "single-nonadaptive":
        return _design_row(nonadaptive_opt(p, c.leakage_model))
    if c.scheme == "multi-adaptive":
        eta = _eta(c)
        return _design_row(ao_optimize(p, ChannelSnapshot(eta=eta))[0], eta)
    return _design_row(nonadaptive_opt_multi(p, n=c.n)[0])


def _throughput_single_adaptive(c):
    p = c.params
    eta = _eta(c)
    snap = ChannelSnapshot(eta=eta)
    if c.R_s is None:
        dp = adaptive_conditional_opt(p, snap, c.leakage_model)
        return {"R_s_opt": dp.R_s, "throughput": dp.throughput}
    R_e = invert_redundancy(p, 1.0, p.N, p.delta, c.leakage_model)
    on = eta > adaptive_on_off_threshold(p, R_e)
    return {"throughput": c.R_s * p_success(p.P_b * eta, p.N, c.R_s + R_e) if on else 0.0}


def _throughput_single_nonadaptive(c):
    p = c.params
    if c.R_s is None:
        dp = nonadaptive_opt(p, c.leakage_model)
        return {"R_s_opt": dp.R_s, "throughput": dp.throughput}
    return {"throughput": float(nonadaptive_throughput(p, c.R_s, c.n, c.leakage_model))}


def _throughput_multi_adaptive(c):
    p = c.params
    snap = ChannelSnapshot(eta=_eta(c))
    on = snap.eta > multi_threshold(p)
    if c.phi is None and c.R_s is None:
        dp, _ = ao_optimize(p, snap)
        return {"phi_opt": dp.phi, "R_s_opt": dp.R_s, "throughput": dp.throughput}
    if c.phi is None:
        phi = adaptive_phi_opt(p, snap, c.R_s) if on else math.nan
        T = c.R_s * ps_multi(p, snap, phi, c.R_s) if on else 0.0
        return {"phi_opt": phi, "throughput": T}
    if c.R_s is None:
        R_s = adaptive_rs_opt(p, snap, c.phi) if on else 0.0
        return {"R_s_opt": R_s, "throughput": R_s * ps_multi(p, snap, c.phi, R_s) if on else 0.0}
    return {"throughput": c.R_s * ps_multi(p, snap, c.phi, c.R_s) if on else 0.0}


def _throughput_multi_nonadaptive(c):
    p = c.params
    if c.phi is None and c.R_s is None:
        dp, _ = nonadaptive_opt_multi(p, n=c.n)
        return {"phi_opt": dp.phi, "R_s_opt": dp.R_s, "throughput": dp.throughput}
    if c.phi is None:
        phi = nonadaptive_phi_opt_multi(p, c.R_s, c.n)
        return {"phi_opt": phi, "throughput": nonadaptive_throughput_multi(p, phi, c.R_s, c.n)}
    if c.R_s is None:
        R_s = nonadaptive_rs_opt_multi(p, c.phi, c.n)
        return {"R_s_opt": R_s, "throughput": nonadaptive_throughput_multi(p, c.phi, R_s, c.n)}
    return {"throughput": nonadaptive_throughput_multi(p, c.phi, c.R_s, c.n)}


_THROUGHPUT = {
    "single-adaptive": _throughput_single_adaptive,
    "single-nonadaptive": _throughput_single_nonadaptive,
    "multi-adaptive": _throughput_multi_adaptive,
    "multi-nonadaptive": _throughput_multi_nonadaptive,
}


def _leakage_row(c):
    p = c.params
    if c.R_e is None:
        raise ConfigError("R_e", "leakage mode needs a rate redundancy R_e")
    phi = _phi(c)
    n = p.N if c.n is None else c.n
    row = {"Oe_exact": leakage_exact(p, phi, n, c.R_e)}
    if p.M >= 2:
        row["Oe_asymptotic"] = leakage(p, phi, n, c.R_e, LeakageModel.ASYMPTOTIC)
    else:
        try:
            row["Oe_piecewise"] = leakage_piecewise(p, phi, n, c.R_e)
        except DomainError:
            row["Oe_piecewise"] = math.nan
    return row


def _compare_row(c):
    p = c.params
    if c.is_multi:
        ta = adaptive_expected_throughput_multi(p)
        tn = nonadaptive_opt_multi(p)[0].throughput
    else:
        ta = adaptive_expected_throughput(p, c.leakage_model)
        tn = nonadaptive_opt(p, c.leakage_model).throughput
    return {"T_adaptive": ta, "T_nonadaptive": tn, "delta_T": ta - tn}


def row_sweep(c: ScenarioConfig) -> dict:
    """Mode-dependent outputs; unspecified design variables are optimized."""
    if c.mode == "leakage":
        return _leakage_row(c)
    if c.mode == "compare":
        return _compare_row(c)
    return _THROUGHPUT[c.scheme](c)


# ---------------------------------------------------------------------------
# Grid expansion, evaluation and CSV output
# ---------------------------------------------------------------------------

def expand(c: ScenarioConfig):
    """(axis names, [(axis values, point config)]) in grid order; validates every point."""
    names = [a for a, _ in c.sweep]
    if len(set(names)) != len(names):
        raise ConfigError("sweep", "duplicate sweep axis")
    if not names:
        return [], [((), c)]
    points = []
    for values in itertools.product(*(g for _, g in c.sweep)):
        points.append((values, c.with_point(**dict(zip(names, values)))))
    return names, points


def _workers(n_points: int) -> int:
    env = os.environ.get("FBLSEC_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ConfigError("FBLSEC_THREADS", f"expected a positive integer, got {env!r}") from None
    return max(1, min(cap, n_points))


def evaluate(c: ScenarioConfig, row_fn) -> tuple[list, list]:
    """Header and rows for ``row_fn`` over the sweep grid (grid order preserved)."""
    names, points = expand(c)
    with ThreadPoolExecutor(max_workers=_workers(len(points))) as pool:
        results = list(pool.map(lambda pt: row_fn(pt[1]), points))
    header = list(names)
    for r in results:
        header.extend(k for k in r if k not in header)
    rows = []
    for (values, _), r in zip(points, results):
        rows.append(list(values) + [r.get(k, "") for k in header[len(names):]])
    return header, rows


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # Reader closed early (e.g. piped into head); silence the exit-time flush.
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    else:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _error(kind: str, exc: Exception, field_name=None) -> None:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if field_name is not None:
        payload["field"] = field_name
    print(json.dumps(payload), file=sys.stderr)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fblsec", description="Finite-blocklength secrecy throughput toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("compute", "evaluate a fixed design"), ("optimize", "optimal design"),
                       ("sweep", "evaluate a parameter grid"), ("verify", "run the verification suite")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="scenario file (key = value lines or JSON)")
        sp.add_argument("--preset", help="named scenario preset (fig2 ... fig8, fig7b)")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        if name == "verify":
            sp.add_argument("--level", choices=("quick", "full"), default="quick")
    return ap


def _run_verify(args) -> int:
    from .verify import DEFAULT_SEED, report_rows, run_checks

    seed = DEFAULT_SEED if args.seed is None else args.seed
    results = run_checks(args.level, seed)
    _emit(to_csv(["check", "status", "measured", "bound"], report_rows(results)), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.config is None and args.preset is None:
            raise ConfigError("config", "a --config file or --preset is required")
        cfg = load_config(args.config, args.preset, {"seed": args.seed, "out": args.out})
        if args.command == "sweep" and not cfg.sweep:
            raise ConfigError("sweep", "sweep needs at least one sweep.<axis> entry")
        if args.command == "optimize":
            # The optimizer chooses these itself; a swept value would shadow the optimum's column.
            cfg.sweep = [(a, g) for a, g in cfg.sweep if a not in OPTIMIZED_AXES]
        row_fn = {"compute": row_compute, "optimize": row_optimize, "sweep": row_sweep}[args.command]
        header, rows = evaluate(cfg, row_fn)
        _emit(to_csv(header, rows), cfg.out)
        return EXIT_OK
    except ConfigError as exc:
        _error("validation", exc, exc.field)
        return EXIT_VALIDATION
    except DomainError as exc:
        _error("validation", exc)
        return EXIT_VALIDATION
    except (FblsecError, ArithmeticError) as exc:
        _error("numeric", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
