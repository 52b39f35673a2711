"""Run configuration: a flat ``key = value`` file plus command-line overrides.

Unknown keys are errors. Lists are comma separated; ``start:stop:num``
expands to an evenly spaced grid and ``geom:start:stop:num`` to a
geometric one.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Model, PhysicalParams
from .design import DEFAULT_IE_TF, Scheme
from .errors import ConfigError
from .gpe import Grid

COMMANDS = ("design", "simulate", "scan", "verify")
SCAN_TYPES = ("min-time", "energy", "fidelity", "unattainability")
OUTPUT_ENV = "STA_OUTPUT_DIR"


def _float(v) -> float:
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"{v!r} is not finite")
    return x


def _opt_float(v):
    if v is None or str(v).strip().lower() in ("", "none", "auto"):
        return None
    return _float(v)


def parse_grid(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        vals = [_float(v) for v in text]
    else:
        s = str(text).strip()
        parts = s.split(":")
        if parts[0] == "geom" and len(parts) == 4:
            vals = np.geomspace(_float(parts[1]), _float(parts[2]), int(parts[3])).tolist()
        elif len(parts) == 3:
            vals = np.linspace(_float(parts[0]), _float(parts[1]), int(parts[2])).tolist()
        else:
            vals = [_float(v) for v in s.split(",") if v.strip()]
    if not vals:
        raise ValueError("empty grid")
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"grid not sorted: {vals}")
    return tuple(vals)


def _names(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(Scheme.parse(t).value for t in text)
    return tuple(Scheme.parse(t).value for t in str(text).split(",") if t.strip())


def _bool(v) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


@dataclass
class RunConfig:
    command: str = "design"
    gn: float = 0.0
    gamma: float = 10.0
    delta: float = 1.0
    model: str = "generalized"
    scheme: str = "bang-bang"
    tf: float = DEFAULT_IE_TF
    half_width: float = 128.0
    n_points: int = 4096
    dt: float | None = None
    dt_imag: float = 1e-3
    tol_imag: float = 1e-12
    stride: int = 10
    snapshots: tuple = ()
    scan: str = "min-time"
    scan_gn: tuple = (0.0,)
    scan_delta: tuple = (1.0,)
    scan_gamma: tuple = (10.0,)
    schemes: tuple = ("inverse-engineering", "two-jump", "bang-bang")
    gpe: bool = False
    workers: int = 1
    omega0_hz: float | None = None
    report: str | None = None
    protocol: str | None = None
    out: str = "."
    params: PhysicalParams = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.scan not in SCAN_TYPES:
            raise ConfigError(f"unknown scan type {self.scan!r}; expected one of {SCAN_TYPES}")
        try:
            self.params = PhysicalParams(self.gn, self.gamma, self.delta, Model.parse(self.model))
            Scheme.parse(self.scheme)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.tf <= 0 or self.stride < 1 or self.workers < 1:
            raise ConfigError("tf must be positive; stride and workers at least 1")
        if self.omega0_hz is not None and self.omega0_hz <= 0:
            raise ConfigError("omega0_hz must be positive")
        try:
            Grid(self.half_width, self.n_points)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def output_dir(self) -> Path:
        return Path(self.out)


_CONVERTERS = {
    "gn": _float, "gamma": _float, "delta": _float, "model": lambda v: Model.parse(v).value,
    "scheme": lambda v: Scheme.parse(v).value, "tf": _float, "half_width": _float,
    "n_points": int, "dt": _opt_float, "dt_imag": _float, "tol_imag": _float, "stride": int,
    "snapshots": lambda v: parse_grid(v) if str(v).strip() else (),
    "scan": str, "scan_gn": parse_grid, "scan_delta": parse_grid, "scan_gamma": parse_grid,
    "schemes": _names, "gpe": _bool, "workers": int, "omega0_hz": _opt_float,
    "report": str, "protocol": str, "out": str,
}
KEYS = tuple(_CONVERTERS)


def normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_").lower()


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        k = normalize_key(k)
        if k not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {k!r}")
        out[k] = v.strip()
    return out


def parse_overrides(args) -> dict:
    """Turn ``['--gn', '0.01', '--gamma=10']`` into a raw key/value dict."""
    out = {}
    i = 0
    args = list(args)
    while i < len(args):
        a = args[i]
        if not a.startswith("--"):
            raise ConfigError(f"unexpected argument {a!r}")
        if "=" in a:
            k, v = a.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(args):
                raise ConfigError(f"missing value for {a}")
            k, v = a, args[i + 1]
            i += 2
        k = normalize_key(k)
        if k not in KEYS:
            raise ConfigError(f"unknown option --{k.replace('_', '-')}")
        out[k] = v
    return out


def build_config(command: str, file_values: dict | None = None, overrides: dict | None = None,
                 env=None) -> RunConfig:
    """Merge file values, the output-directory environment variable and overrides."""
    env = os.environ if env is None else env
    raw = dict(file_values or {})
    if env.get(OUTPUT_ENV):
        raw["out"] = env[OUTPUT_ENV]
    raw.update(overrides or {})
    kwargs = {}
    for k, v in raw.items():
        try:
            kwargs[k] = _CONVERTERS[k](v)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {k}: {exc}") from exc
    return RunConfig(command=command, **kwargs)


def load_config_file(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config_text(text, str(p))
