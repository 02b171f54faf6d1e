"""CSV and SVG emission for sweep results.

The CSV starts with the resolved configuration as ``# key=value`` comment
lines, followed by the header ``CSV_COLUMNS`` and one row per
(sweep point, solver).  Floats are written with ``repr`` so a CSV read back
reproduces the plot byte for byte.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_from_text
from .experiment import PointSummary, SweepResult

CSV_COLUMNS = (
    "sweep_var", "value", "solver", "nmse_mean", "nmse_median",
    "nmse_stderr", "trials", "mean_Q", "seed", "config_hash",
)

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")
DASHES = {"rect": "6,4"}


def write_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    buf = io.StringIO()
    for line in result.config.to_text().splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in result.summary:
        writer.writerow([
            s.sweep_var, repr(s.value), s.solver, repr(s.nmse_mean), repr(s.nmse_median),
            repr(s.nmse_stderr), s.trials, repr(s.mean_Q), s.seed, s.config_hash,
        ])
    path.write_text(buf.getvalue())
    return path


def read_csv(path) -> tuple[list[PointSummary], ExperimentConfig]:
    lines = Path(path).read_text().splitlines()
    cfg_lines = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(body):
        rows.append(PointSummary(
            sweep_var=rec["sweep_var"],
            value=float(rec["value"]),
            solver=rec["solver"],
            nmse_mean=float(rec["nmse_mean"]),
            nmse_median=float(rec["nmse_median"]),
            nmse_stderr=float(rec["nmse_stderr"]),
            trials=int(rec["trials"]),
            mean_Q=float(rec["mean_Q"]),
            seed=int(rec["seed"]),
            config_hash=rec["config_hash"],
        ))
    return rows, config_from_text("\n".join(cfg_lines))


AXIS_LABELS = {"snr_db": "SNR (dB)", "L_w": "roll-off length L_w", "u_nu": "Doppler oversampling u_nu", "L": "pilot length L"}


def write_svg(rows: list[PointSummary], path, title: str = "") -> Path:
    """Log-scale NMSE against the swept variable, one polyline per solver."""
    width, height = 640, 440
    left, right, top, bottom = 70, 170, 40, 55
    pw, ph = width - left - right, height - top - bottom

    solvers = list(dict.fromkeys(r.solver for r in rows))
    xs = np.array([r.value for r in rows], dtype=float)
    ys = np.array([r.nmse_mean for r in rows], dtype=float)
    good = np.isfinite(ys) & (ys > 0)
    x_lo, x_hi = (xs.min(), xs.max()) if xs.size else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if good.any():
        d_lo = math.floor(np.log10(ys[good].min()))
        d_hi = math.ceil(np.log10(ys[good].max()))
    else:
        d_lo, d_hi = -3, 0
    if d_hi == d_lo:
        d_hi += 1

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + (d_hi - math.log10(y)) / (d_hi - d_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.2f}" y="22" text-anchor="middle" font-size="14">{_esc(title)}</text>',
    ]
    for d in range(d_lo, d_hi + 1):
        y = top + (d_hi - d) / (d_hi - d_lo) * ph
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    for x in sorted(set(xs.tolist())):
        out.append(f'<line x1="{px(x):.2f}" y1="{top + ph}" x2="{px(x):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(x):.2f}" y="{top + ph + 18}" text-anchor="middle">{x:g}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    xlabel = AXIS_LABELS.get(rows[0].sweep_var, rows[0].sweep_var) if rows else ""
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 15}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.2f})">NMSE</text>')

    for i, solver in enumerate(solvers):
        color = PALETTE[i % len(PALETTE)]
        dash = DASHES.get(solver.rsplit("_", 1)[-1])
        pts = [(px(r.value), py(r.nmse_mean)) for r in rows
               if r.solver == solver and math.isfinite(r.nmse_mean) and r.nmse_mean > 0]
        style = f' stroke-dasharray="{dash}"' if dash else ""
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        out.append(f'<g class="series" data-solver="{_esc(solver)}">')
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"{style}/>')
        for x, y in pts:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        ly = top + 10 + 20 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"{style}/>')
        out.append(f'<text x="{left + pw + 46}" y="{ly + 4}">{_esc(solver)}</text>')
        out.append("</g>")
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def _esc(text: str) -> str:
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_outputs(result: SweepResult, out_dir, formats=("csv", "plot")) -> dict[str, Path]:
    """Write ``<name>.csv`` and/or ``<name>.svg`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = result.config.name
    written = {}
    if "csv" in formats:
        written["csv"] = write_csv(result, out_dir / f"{name}.csv")
    if "plot" in formats:
        written["plot"] = write_svg(result.summary, out_dir / f"{name}.svg", title=name)
    return written


def replot(csv_path, svg_path=None) -> Path:
    rows, cfg = read_csv(csv_path)
    svg_path = svg_path or Path(csv_path).with_suffix(".svg")
    return write_svg(rows, svg_path, title=cfg.name)
