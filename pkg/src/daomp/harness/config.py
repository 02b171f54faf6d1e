"""Experiment configuration and its flat ``section.key=value`` text format."""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, fields
from pathlib import Path

from ..model import DDGridSpec, FrameSpec

SOLVERS = ("da_omp_rcos", "da_omp_rect", "omp_rcos", "omp_rect")
SWEEP_VARS = ("snr_db", "L_w", "u_nu", "L")
OMP_RULES = ("fixed_paths", "residual")


class ConfigError(ValueError):
    pass


# text key -> attribute name, in canonical output order
KEYS = {
    "run.name": "name",
    "frame.L": "L",
    "frame.L_w_frac": "L_w_frac",
    "frame.ell_max": "ell_max",
    "grid.G_tau": "G_tau",
    "grid.G_nu": "G_nu",
    "grid.u_nu": "u_nu",
    "channel.P_min": "P_min",
    "channel.P_max": "P_max",
    "channel.gain_model": "gain_model",
    "channel.doppler_max": "doppler_max",
    "channel.on_grid": "on_grid",
    "noise.snr_db": "snr_db",
    "sweep.var": "sweep_var",
    "sweep.values": "sweep_values",
    "solver.list": "solvers",
    "solver.omp_rule": "omp_rule",
    "solver.normalize": "normalize",
    "solver.delay_model": "delay_model",
    "solver.interference_delay": "interference_delay",
    "run.trials": "trials",
    "run.seed": "seed",
    "run.workers": "workers",
    "run.out": "out_dir",
}
ATTRS = {v: k for k, v in KEYS.items()}
# keys that cannot change results and so stay out of the fingerprint
NON_SEMANTIC = ("run.workers", "run.out")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo sweep.

    ``sweep_var`` picks the swept quantity; every other quantity keeps its
    fixed value.  The rcos roll-off is ``L_w_frac * L`` unless ``L_w`` itself
    is swept.  When ``u_nu`` is swept, ``G_nu`` scales with it so the grid
    keeps covering the same Doppler span.  ``ell_max`` and
    ``interference_delay`` default to ``G_tau``.
    """

    name: str = "experiment"
    L: int = 128
    L_w_frac: float = 0.5
    ell_max: int | None = None
    G_tau: int = 4
    G_nu: int = 16
    u_nu: int = 2
    P_min: int = 5
    P_max: int = 8
    gain_model: str = "complex_uniform_mag"
    doppler_max: float | None = None
    on_grid: bool = False
    snr_db: float = 20.0
    sweep_var: str = "snr_db"
    sweep_values: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    solvers: tuple = SOLVERS
    omp_rule: str = "fixed_paths"
    normalize: bool = False
    delay_model: str = "linear"
    interference_delay: int | None = None
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigError(f"sweep.var must be one of {SWEEP_VARS}, got {self.sweep_var!r}")
        if not self.sweep_values:
            raise ConfigError("sweep.values is empty")
        if any(math.isnan(v) for v in self.sweep_values):
            raise ConfigError("sweep values must not be NaN")
        if self.sweep_var != "snr_db" and not all(math.isfinite(v) for v in self.sweep_values):
            raise ConfigError(f"{self.sweep_var} sweep values must be finite")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ConfigError(f"unknown solver {s!r}; choose from {SOLVERS}")
        if not self.solvers:
            raise ConfigError("solver.list is empty")
        if self.omp_rule not in OMP_RULES:
            raise ConfigError(f"solver.omp_rule must be one of {OMP_RULES}")
        if self.P_min < 0 or self.P_max < self.P_min:
            raise ConfigError("invalid channel.P_min / channel.P_max")
        try:
            for v in self.sweep_values:
                self.point(v)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def point(self, value: float) -> "SweepPoint":
        """Resolve the frame, grid and SNR of one sweep point."""
        L, u_nu, G_nu, snr = self.L, self.u_nu, self.G_nu, self.snr_db
        L_w = None
        if self.sweep_var == "snr_db":
            snr = value
        elif self.sweep_var == "L":
            L = _as_int(value, "L")
        elif self.sweep_var == "L_w":
            L_w = _as_int(value, "L_w")
        elif self.sweep_var == "u_nu":
            u_nu = _as_int(value, "u_nu")
            G_nu = self.G_nu * u_nu / self.u_nu
            if G_nu != int(G_nu):
                raise ValueError(f"u_nu={u_nu} gives a non-integer G_nu={G_nu}")
            G_nu = int(G_nu)
        if L_w is None:
            L_w = self.L_w_frac * L
            if L_w != int(L_w):
                raise ValueError(f"L_w_frac={self.L_w_frac} gives a non-integer roll-off for L={L}")
            L_w = int(L_w)
        ell_max = self.G_tau if self.ell_max is None else self.ell_max
        return SweepPoint(
            frame=FrameSpec(L, L_w, ell_max),
            grid=DDGridSpec(self.G_tau, G_nu, u_nu),
            snr_db=float(snr),
        )

    def to_text(self, semantic_only: bool = False) -> str:
        lines = []
        for key, attr in KEYS.items():
            if semantic_only and key in NON_SEMANTIC:
                continue
            lines.append(f"{key}={_format(getattr(self, attr))}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_text(semantic_only=True).encode()).hexdigest()[:12]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, items: dict[str, str]) -> "ExperimentConfig":
        """Apply ``section.key -> text value`` overrides."""
        return self.replace(**_parse_items(items))


@dataclass(frozen=True)
class SweepPoint:
    frame: FrameSpec
    grid: DDGridSpec
    snr_db: float


def _as_int(value: float, name: str) -> int:
    if value != int(value):
        raise ValueError(f"{name} sweep values must be integers, got {value}")
    return int(value)


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    return str(value)


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(attr: str, text: str):
    text = text.strip()
    kind = _TYPES[attr]
    if "None" in kind and text.lower() == "none":
        return None
    try:
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
        if kind == "bool":
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if kind == "tuple":
            parts = [p.strip() for p in text.split(",") if p.strip()]
            if attr == "sweep_values":
                return tuple(float(p) for p in parts)
            return tuple(parts)
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r} for {ATTRS[attr]}") from exc
    return text


def _parse_items(items: dict[str, str]) -> dict:
    out = {}
    for key, text in items.items():
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[KEYS[key]] = _parse_value(KEYS[key], text)
    return out


def parse_text(text: str) -> dict[str, str]:
    items = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        items[key.strip()] = value.strip()
    return items


def config_from_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    base = base or ExperimentConfig()
    try:
        return base.with_overrides(parse_text(text))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    return config_from_text(Path(path).read_text())


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(cfg.to_text())
