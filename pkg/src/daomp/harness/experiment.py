"""Seeded Monte-Carlo NMSE sweeps.

Seeding scheme (all via ``numpy.random.SeedSequence``):

* pilot of length ``L``: ``[seed, 0, L]``
* channel of trial ``t``: ``[seed, 1, t]`` (shared by every sweep point)
* noise of trial ``t`` at point ``p``: ``[seed, 2, p, t]``

Every trial is therefore a pure function of the config, so results do not
depend on the number of workers or the order in which trials run.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..channel import ChannelDrawConfig, NoiseConfig, draw_channel, gen_pilot, propagate, receiver_front_end
from ..dictionary import WindowedDictionary, build_dictionary
from ..model import FrameSpec, channel_matrix
from ..solver import StoppingRule, da_omp, omp_baseline, reconstruct_channel
from .config import ExperimentConfig, config_from_text

log = logging.getLogger(__name__)


def nmse(H_est: np.ndarray, H_true: np.ndarray) -> float:
    """``||H_est - H_true||_F^2 / ||H_true||_F^2``."""
    H_est, H_true = np.asarray(H_est), np.asarray(H_true)
    if H_est.shape != H_true.shape:
        raise ValueError(f"shape mismatch {H_est.shape} vs {H_true.shape}")
    ref = np.linalg.norm(H_true) ** 2
    if ref == 0:
        raise ValueError("true channel is zero")
    return float(np.linalg.norm(H_est - H_true) ** 2 / ref)


@dataclass
class TrialResult:
    point: int
    value: float
    trial: int
    solver: str
    nmse: float = math.nan
    Q: int = 0
    iterations: int = 0
    stop_reason: str = ""
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class PointSummary:
    sweep_var: str
    value: float
    solver: str
    nmse_mean: float
    nmse_median: float
    nmse_stderr: float
    trials: int
    mean_Q: float
    seed: int
    config_hash: str
    failures: int = 0


@dataclass
class SweepResult:
    config: ExperimentConfig
    summary: list[PointSummary]
    trials: list[TrialResult] = field(default_factory=list)

    def series(self, solver: str, stat: str = "nmse_mean") -> tuple[np.ndarray, np.ndarray]:
        rows = [s for s in self.summary if s.solver == solver]
        return np.array([s.value for s in rows]), np.array([getattr(s, stat) for s in rows])

    def at(self, solver: str, value: float) -> PointSummary:
        for s in self.summary:
            if s.solver == solver and s.value == value:
                return s
        raise KeyError((solver, value))


@dataclass(frozen=True, eq=False)
class Receiver:
    frame: FrameSpec
    window: np.ndarray
    dictionary: WindowedDictionary


@dataclass(frozen=True, eq=False)
class PointSetup:
    tx_frame: FrameSpec
    pilot: np.ndarray
    receivers: dict
    snr_db: float
    grid: object


def build_point(cfg: ExperimentConfig, value: float) -> PointSetup:
    pt = cfg.point(value)
    frame, grid = pt.frame, pt.grid
    pilot = gen_pilot(frame.L, np.random.SeedSequence([cfg.seed, 0, frame.L])).x
    receivers = {}
    windows = {s.rsplit("_", 1)[1] for s in cfg.solvers}
    for name in sorted(windows):
        rx_frame = frame if name == "rcos" else FrameSpec(frame.L, 0, frame.ell_max)
        D = build_dictionary(
            pilot, rx_frame, grid,
            normalize=cfg.normalize,
            interference_delay=cfg.interference_delay,
            delay_model=cfg.delay_model,
        )
        receivers[name] = Receiver(rx_frame, D.window, D)
    return PointSetup(frame, pilot, receivers, pt.snr_db, grid)


def channel_config(cfg: ExperimentConfig) -> ChannelDrawConfig:
    doppler = None if cfg.doppler_max is None else (0.0, cfg.doppler_max)
    return ChannelDrawConfig(
        P_range=(cfg.P_min, cfg.P_max),
        gain_model=cfg.gain_model,
        doppler_range=doppler,
        on_grid=cfg.on_grid,
    )


def run_trial(cfg: ExperimentConfig, setup: PointSetup, point: int, value: float, trial: int) -> list[TrialResult]:
    paths = draw_channel(channel_config(cfg), setup.grid, np.random.SeedSequence([cfg.seed, 1, trial]))
    L = setup.tx_frame.L
    H = channel_matrix(paths, L, L)
    noise = NoiseConfig(setup.snr_db)
    r = propagate(setup.pilot, setup.tx_frame, paths, noise, np.random.SeedSequence([cfg.seed, 2, point, trial]))

    out = []
    for solver in cfg.solvers:
        res = TrialResult(point, value, trial, solver)
        try:
            kind, window = solver.rsplit("_", 1)
            rx = setup.receivers[window]
            y = receiver_front_end(r, rx.frame, rx.window, setup.tx_frame)
            if kind == "da_omp":
                est = da_omp(rx.dictionary, y)
            elif cfg.omp_rule == "fixed_paths":
                est = omp_baseline(rx.dictionary, y, StoppingRule.fixed(paths.P))
            else:
                threshold = rx.frame.L_prime * noise.sigma2
                est = omp_baseline(rx.dictionary, y, StoppingRule.residual(threshold))
            res.nmse = nmse(reconstruct_channel(est, setup.grid, L), H)
            res.Q = est.Q
            res.iterations = len(est.trace)
            res.stop_reason = est.stop_reason
        except Exception as exc:  # recorded, the sweep carries on
            res.error = f"{type(exc).__name__}: {exc}"
            log.warning("trial %d at point %d (%s) failed: %s", trial, point, solver, res.error)
        out.append(res)
    return out


@lru_cache(maxsize=8)
def _cached_setup(cfg_text: str, value: float) -> PointSetup:
    return build_point(config_from_text(cfg_text), value)


def _run_chunk(args) -> list[TrialResult]:
    cfg_text, point, value, trials = args
    cfg = config_from_text(cfg_text)
    setup = _cached_setup(cfg_text, value)
    out = []
    for t in trials:
        out.extend(run_trial(cfg, setup, point, value, t))
    return out


def aggregate(cfg: ExperimentConfig, trials: list[TrialResult]) -> list[PointSummary]:
    summary = []
    fp = cfg.fingerprint()
    for point, value in enumerate(cfg.sweep_values):
        for solver in cfg.solvers:
            rows = [t for t in trials if t.point == point and t.solver == solver]
            good = [t for t in rows if t.ok]
            vals = np.array([t.nmse for t in good])
            n = vals.size
            summary.append(PointSummary(
                sweep_var=cfg.sweep_var,
                value=value,
                solver=solver,
                nmse_mean=float(vals.mean()) if n else math.nan,
                nmse_median=float(np.median(vals)) if n else math.nan,
                nmse_stderr=float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan,
                trials=n,
                mean_Q=float(np.mean([t.Q for t in good])) if n else math.nan,
                seed=cfg.seed,
                config_hash=fp,
                failures=len(rows) - n,
            ))
    return summary


def run_sweep(cfg: ExperimentConfig, workers: int | None = None, keep_trials: bool = True) -> SweepResult:
    """Run every (sweep point, trial, solver) combination and aggregate NMSE."""
    workers = workers or cfg.workers
    cfg_text = cfg.to_text()
    chunk = max(1, math.ceil(cfg.trials / (4 * workers)))
    jobs = [
        (cfg_text, p, v, range(start, min(start + chunk, cfg.trials)))
        for p, v in enumerate(cfg.sweep_values)
        for start in range(0, cfg.trials, chunk)
    ]
    if workers == 1:
        parts = [_run_chunk(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    trials = [t for part in parts for t in part]
    trials.sort(key=lambda t: (t.point, t.trial, cfg.solvers.index(t.solver)))
    return SweepResult(cfg, aggregate(cfg, trials), trials if keep_trials else [])
