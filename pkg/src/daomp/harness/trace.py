"""Single-trial correlation dumps: ``|Psi^H r_i|`` at every DA-OMP iteration."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..channel import NoiseConfig, draw_channel, propagate, receiver_front_end
from ..model import PathSet
from ..solver import SparseEstimate, da_omp
from .config import ExperimentConfig
from .experiment import build_point, channel_config

TRACE_CSV_COLUMNS = ("window", "iteration", "d", "correlation")


@dataclass
class TraceResult:
    paths: PathSet
    estimates: dict[str, SparseEstimate]
    n_support: int

    def stop_iteration(self, window: str) -> int:
        """Iteration index at which the loop condition failed."""
        return len(self.estimates[window].trace)

    def correlations(self, window: str) -> list[np.ndarray]:
        return self.estimates[window].correlations


def trace_experiment(cfg: ExperimentConfig, trial: int = 0, paths: PathSet | None = None) -> TraceResult:
    """Run DA-OMP with both windows on one channel draw, keeping every correlation vector."""
    cfg = cfg.replace(sweep_var="snr_db", sweep_values=(cfg.snr_db,),
                      solvers=("da_omp_rcos", "da_omp_rect"))
    setup = build_point(cfg, cfg.snr_db)
    if paths is None:
        paths = draw_channel(channel_config(cfg), setup.grid, np.random.SeedSequence([cfg.seed, 1, trial]))
    r = propagate(setup.pilot, setup.tx_frame, paths, NoiseConfig(setup.snr_db),
                  np.random.SeedSequence([cfg.seed, 2, 0, trial]))
    estimates = {}
    for window, rx in setup.receivers.items():
        y = receiver_front_end(r, rx.frame, rx.window, setup.tx_frame)
        estimates[window] = da_omp(rx.dictionary, y, keep_correlations=True)
    return TraceResult(paths, estimates, setup.grid.n_cells)


def write_trace(result: TraceResult, out_dir, name: str = "trace") -> dict[str, Path]:
    """Write ``<name>.csv`` (long format) and ``<name>_summary.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corr_path = out_dir / f"{name}.csv"
    with open(corr_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_CSV_COLUMNS)
        for window, est in result.estimates.items():
            for i, corr in enumerate(est.correlations):
                for d, c in enumerate(corr):
                    w.writerow([window, i, d, repr(float(c))])
    summary_path = out_dir / f"{name}_summary.csv"
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window", "stop_iteration", "Q", "stop_reason", "exit_beta", "exit_gamma", "support"])
        for window, est in result.estimates.items():
            w.writerow([window, result.stop_iteration(window), est.Q, est.stop_reason,
                        repr(est.exit_beta), repr(est.exit_gamma), " ".join(map(str, est.support))])
    return {"csv": corr_path, "summary": summary_path}
