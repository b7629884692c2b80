"""Scenario configuration for the command line: parsing and validation.

Two formats are accepted: a JSON object, or flat ``key = value`` lines
(``#`` starts a comment). Any numeric key may carry a ``_db`` suffix, in
which case the value is converted to linear. ``Gamma_b``/``Gamma_e`` set
the channel variances from average SNRs at the given powers.

Sweep axes are ``sweep.<name> = <grid>`` lines (or a ``"sweep"`` object in
JSON) where a grid is either a comma list or ``start:stop:step``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .channel import SystemParams, db_to_linear
from .errors import DomainError
from .leakage import LeakageModel

SCHEMES = ("single-adaptive", "single-nonadaptive", "multi-adaptive", "multi-nonadaptive")
MODES = ("throughput", "leakage", "compare")

_PARAM_FIELDS = {f.name for f in fields(SystemParams)}
_INT_FIELDS = {"M", "M_e", "N", "n", "seed"}
_DESIGN_FIELDS = {"eta", "R_s", "R_e", "phi", "n"}
_SNR_ALIASES = {"Gamma_b", "Gamma_e"}
SWEEP_AXES = sorted(_PARAM_FIELDS - {"worst_case_eve"} | _DESIGN_FIELDS | _SNR_ALIASES)


class ConfigError(DomainError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ScenarioConfig:
    params: SystemParams = field(default_factory=SystemParams)
    scheme: str = "single-adaptive"
    mode: str = "throughput"
    leakage_model: LeakageModel | None = None
    sweep: list = field(default_factory=list)
    seed: int = 0
    out: str | None = None
    eta: float | None = None
    R_s: float | None = None
    R_e: float | None = None
    phi: float | None = None
    n: int | None = None
    Gamma_b: float | None = None
    Gamma_e: float | None = None

    @property
    def is_multi(self) -> bool:
        return self.scheme.startswith("multi")

    def with_point(self, **values) -> "ScenarioConfig":
        """Copy with sweep-axis values applied (parameters re-validated)."""
        raw = {k: v for k, v in vars(self).items() if k not in ("params", "sweep")}
        raw.update({f.name: getattr(self.params, f.name) for f in fields(SystemParams)})
        for var, alias in (("sigma_b2", "Gamma_b"), ("sigma_e2", "Gamma_e")):
            if var in values:
                raw.pop(alias, None)
        raw.update(values)
        raw["sweep"] = []
        return _build(raw)


def _to_bool(key, v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {v!r}")


def _to_number(key, v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    try:
        return float(str(v).strip())
    except ValueError:
        raise ConfigError(key, f"expected a number, got {v!r}") from None


def parse_grid(key: str, spec) -> list:
    """Comma list, ``start:stop:step`` (inclusive) or a JSON list."""
    if isinstance(spec, (list, tuple)):
        vals = [_to_number(key, v) for v in spec]
    else:
        s = str(spec).strip()
        if not s:
            raise ConfigError(key, "empty grid")
        if ":" in s:
            parts = s.split(":")
            if len(parts) != 3:
                raise ConfigError(key, f"range grid must be start:stop:step, got {s!r}")
            a, b, h = (_to_number(key, p) for p in parts)
            if not h > 0:
                raise ConfigError(key, "grid step must be > 0")
            k = int(math.floor((b - a) / h + 1e-9))
            # Rounded so decimal steps give decimal points (0.15, not 0.15000000000000002).
            vals = [round(a + i * h, 12) for i in range(k + 1)]
        else:
            vals = [_to_number(key, p) for p in s.split(",") if p.strip()]
    if not vals:
        raise ConfigError(key, "empty grid")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(key, "grid must be strictly increasing")
    return vals


def _split_db(key):
    return (key[:-3], True) if key.endswith("_db") else (key, False)


def _build(raw: dict) -> ScenarioConfig:
    cfg = {}
    param_kw = {}
    sweep = []
    for key, value in raw.items():
        if key == "sweep":
            items = value.items() if isinstance(value, dict) else value
            for name, grid in items:
                sweep.append(_sweep_axis(name, grid))
            continue
        base, is_db = _split_db(key)
        if value is None:
            continue
        if base == "worst_case_eve":
            param_kw[base] = _to_bool(key, value)
        elif base in ("scheme", "mode", "out", "leakage_model"):
            cfg[base] = value
        elif base in _PARAM_FIELDS or base in _DESIGN_FIELDS or base in _SNR_ALIASES or base == "seed":
            v = _to_number(key, value)
            if is_db:
                v = float(db_to_linear(v))
            if base in _INT_FIELDS:
                if v != int(v):
                    raise ConfigError(key, f"expected an integer, got {value!r}")
                v = int(v)
            (param_kw if base in _PARAM_FIELDS else cfg)[base] = v
        else:
            raise ConfigError(key, "unknown configuration key")

    scheme = cfg.get("scheme", "single-adaptive")
    if scheme not in SCHEMES:
        raise ConfigError("scheme", f"expected one of {', '.join(SCHEMES)}, got {scheme!r}")
    mode = cfg.get("mode", "throughput")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {mode!r}")
    model = cfg.get("leakage_model")
    if model is not None:
        try:
            model = LeakageModel.parse(model)
        except DomainError as exc:
            raise ConfigError("leakage_model", str(exc)) from None

    P_b = param_kw.get("P_b", 1.0)
    P_e = param_kw.get("P_e", 1.0)
    if cfg.get("Gamma_b") is not None:
        param_kw["sigma_b2"] = cfg["Gamma_b"] / P_b
    if cfg.get("Gamma_e") is not None:
        param_kw["sigma_e2"] = cfg["Gamma_e"] / P_e
    try:
        params = SystemParams(**param_kw)
    except DomainError as exc:
        name = next((f for f in param_kw if str(exc).startswith(f)), "params")
        raise ConfigError(name, str(exc)) from None

    if scheme.startswith("multi") and params.M < 2:
        raise ConfigError("M", f"scheme {scheme} requires M >= 2")
    if scheme.startswith("single") and params.M != 1 and mode != "leakage":
        raise ConfigError("M", f"scheme {scheme} requires M = 1")
    out = ScenarioConfig(params=params, scheme=scheme, mode=mode, leakage_model=model, sweep=sweep,
                         seed=int(cfg.get("seed", 0)), out=cfg.get("out"))
    for k in ("eta", "R_s", "R_e", "phi", "n", "Gamma_b", "Gamma_e"):
        setattr(out, k, cfg.get(k))
    _check_design(out)
    return out


def _check_design(c: ScenarioConfig):
    if c.phi is not None and not 0.0 <= c.phi <= 1.0:
        raise ConfigError("phi", f"must lie in [0, 1], got {c.phi}")
    if c.eta is not None and not c.eta >= 0:
        raise ConfigError("eta", f"must be >= 0, got {c.eta}")
    if c.R_s is not None and not c.R_s >= 0:
        raise ConfigError("R_s", f"must be >= 0, got {c.R_s}")
    if c.R_e is not None and not c.R_e > 0:
        raise ConfigError("R_e", f"must be > 0, got {c.R_e}")
    if c.n is not None and not 1 <= c.n:
        raise ConfigError("n", f"must be >= 1, got {c.n}")


def _sweep_axis(name, grid):
    base, is_db = _split_db(str(name))
    if base not in SWEEP_AXES:
        raise ConfigError(f"sweep.{name}", f"unknown sweep axis; expected one of {', '.join(SWEEP_AXES)}")
    vals = parse_grid(f"sweep.{name}", grid)
    if is_db:
        vals = [float(v) for v in db_to_linear(np.array(vals))]
    if base in _INT_FIELDS:
        if any(v != int(v) for v in vals):
            raise ConfigError(f"sweep.{name}", "integer axis needs integer grid values")
        vals = [int(v) for v in vals]
    return (base, vals)


def parse_text(text: str) -> dict:
    """Parse JSON or key=value text into a raw dictionary."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "JSON config must be an object")
        return data
    raw: dict = {}
    sweep = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("sweep."):
            sweep.append((key[len("sweep."):], value))
        else:
            raw[key] = value
    if sweep:
        raw["sweep"] = sweep
    return raw


def load_config(path: str | None = None, preset: str | None = None, overrides: dict | None = None) -> ScenarioConfig:
    """Merge preset, then config file, then overrides; validate."""
    from .presets import PRESETS

    raw: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; expected one of {', '.join(sorted(PRESETS))}")
        raw.update(parse_text(PRESETS[preset]))
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
        file_raw = parse_text(text)
        if "sweep" in file_raw:
            raw.pop("sweep", None)
        raw.update(file_raw)
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return _build(raw)
