"""Run configuration: defaults, JSON file loading, overrides, validation.

Precedence, lowest to highest: built-in defaults (the reference parameter
set), the JSON config file, the ``FHNLSE_OUTDIR`` environment variable
(output directory only), then ``--set section.key=value`` overrides.
Unknown sections or keys are rejected.
"""

from __future__ import annotations

import copy
import json
import os
from pathlib import Path

from .grid import Grid, PhysicsParams
from .groundstate import SolveOptions
from .kernel import HartreeKernel

__all__ = [
    "DEFAULTS",
    "load_config",
    "apply_overrides",
    "validate_config",
    "params_from",
    "grid_from",
    "kernel_from",
    "solve_options_from",
]

OUTDIR_ENV_VAR = "FHNLSE_OUTDIR"

DEFAULTS: dict = {
    "physics": {"alpha": 0.6, "gamma": 0.5, "d": 2},
    "grid": {"n": 64, "L": 40.0},
    "solver": {
        "q": 1.0,
        "tau0": 0.5,
        "maxIter": 40000,
        "residTol": 1e-6,
        "stallTol": 1e-11,
        "seed": 1,
        "init": "gaussian",
        "initWidth": None,
    },
    "dynamics": {
        "T": 10.0,
        "dt": 1e-3,
        "snapshotStride": 100,
        "sign": 1,
        "hartree": True,
        "init": "groundstate",
        "planeWaveMode": [1, 0],
    },
    "stability": {
        "delta": 0.01,
        "seed": 1,
        "T": 20.0,
        "dt": 1e-3,
        "snapshotStride": 200,
    },
    "rearrange": {"count": 100, "seed": 1},
    "output": {"directory": "out", "formats": ["json", "csv"]},
}


def _merge_checked(base: dict, update: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ValueError(f"unknown config key: {where}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"config section {where} must be an object")
            out[key] = _merge_checked(base[key], value, where)
        else:
            out[key] = value
    return out


def load_config(
    path: str | Path | None = None,
    overrides: list[str] | None = None,
    env: dict | None = None,
) -> dict:
    """Resolve the full configuration and validate it."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        cfg = _merge_checked(cfg, loaded)
    env = os.environ if env is None else env
    outdir = env.get(OUTDIR_ENV_VAR)
    if outdir:
        cfg["output"]["directory"] = outdir
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    validate_config(cfg)
    return cfg


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply ``section.key=value`` strings; values parse as JSON, else string."""
    cfg = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form section.key=value")
        dotted, raw = item.split("=", 1)
        parts = dotted.strip().split(".")
        if len(parts) != 2:
            raise ValueError(f"override key {dotted!r} must be section.key")
        section, key = parts
        if section not in cfg or not isinstance(cfg[section], dict):
            raise ValueError(f"unknown config section: {section}")
        if key not in cfg[section]:
            raise ValueError(f"unknown config key: {section}.{key}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        cfg[section][key] = value
    return cfg


def _require_number(cfg: dict, section: str, key: str, positive: bool = True) -> float:
    value = cfg[section][key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{section}.{key} must be a number (got {value!r})")
    if positive and not value > 0:
        raise ValueError(f"{section}.{key} must be positive (got {value})")
    return float(value)


def validate_config(cfg: dict) -> None:
    """Type/range checks; raises ValueError naming the offending constraint."""
    params_from(cfg)  # validates physics block and alpha/gamma/d coupling
    grid_from(cfg)  # validates grid block
    for key in ("q", "tau0", "residTol"):
        _require_number(cfg, "solver", key)
    if int(cfg["solver"]["maxIter"]) < 1:
        raise ValueError("solver.maxIter must be >= 1")
    _require_number(cfg, "solver", "stallTol", positive=False)
    if cfg["solver"]["initWidth"] is not None:
        _require_number(cfg, "solver", "initWidth")
    for section in ("dynamics", "stability"):
        _require_number(cfg, section, "dt")
        t = _require_number(cfg, section, "T", positive=False)
        if t < 0:
            raise ValueError(f"{section}.T must be nonnegative (got {t})")
        if int(cfg[section]["snapshotStride"]) < 1:
            raise ValueError(f"{section}.snapshotStride must be >= 1")
    if cfg["dynamics"]["sign"] not in (1, -1):
        raise ValueError(f"dynamics.sign must be 1 or -1 (got {cfg['dynamics']['sign']})")
    if not isinstance(cfg["dynamics"]["hartree"], bool):
        raise ValueError("dynamics.hartree must be true or false")
    mode = cfg["dynamics"]["planeWaveMode"]
    if not isinstance(mode, list) or not all(isinstance(c, int) for c in mode):
        raise ValueError("dynamics.planeWaveMode must be a list of integers")
    delta = _require_number(cfg, "stability", "delta", positive=False)
    if delta < 0:
        raise ValueError(f"stability.delta must be nonnegative (got {delta})")
    if int(cfg["rearrange"]["count"]) < 1:
        raise ValueError("rearrange.count must be >= 1")
    formats = cfg["output"]["formats"]
    allowed = {"json", "csv", "snapshots"}
    if not isinstance(formats, list) or not set(formats) <= allowed:
        raise ValueError(f"output.formats must be a sublist of {sorted(allowed)}")


def params_from(cfg: dict) -> PhysicsParams:
    ph = cfg["physics"]
    return PhysicsParams(alpha=float(ph["alpha"]), gamma=float(ph["gamma"]), d=int(ph["d"]))


def grid_from(cfg: dict) -> Grid:
    return Grid(d=int(cfg["physics"]["d"]), n=int(cfg["grid"]["n"]), L=float(cfg["grid"]["L"]))


def kernel_from(cfg: dict) -> HartreeKernel:
    return HartreeKernel(grid_from(cfg), float(cfg["physics"]["gamma"]))


def solve_options_from(cfg: dict) -> SolveOptions:
    s = cfg["solver"]
    return SolveOptions(
        q=float(s["q"]),
        tau0=float(s["tau0"]),
        max_iter=int(s["maxIter"]),
        resid_tol=float(s["residTol"]),
        stall_tol=float(s["stallTol"]),
        seed=int(s["seed"]),
        init=s["init"],
        init_width=None if s["initWidth"] is None else float(s["initWidth"]),
    )
