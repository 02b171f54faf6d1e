"""
NMSE sweeps
===========

Runs the SNR, roll-off, oversampling and pilot-length sweeps with a reduced
trial count and writes CSV + SVG for each into ``demo_results/``.

    python demos/nmse_sweeps.py          # 200 trials per point
    python demos/nmse_sweeps.py 1000     # full count, a few minutes
"""

import sys
import time

from daomp.harness import PRESETS, emit_outputs, run_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200

for name in ("fig3_gtau1", "fig3_gtau4", "fig5", "fig6"):
    cfg = PRESETS[name](trials=trials)
    t0 = time.perf_counter()
    result = run_sweep(cfg)
    files = emit_outputs(result, "demo_results")
    print(f"\n{cfg.name}  ({time.perf_counter() - t0:.0f} s) -> {files['plot']}")
    values = sorted({s.value for s in result.summary})
    print(f"{cfg.sweep_var:>10} " + " ".join(f"{s:>12}" for s in cfg.solvers))
    for v in values:
        print(f"{v:10g} " + " ".join(f"{result.at(s, v).nmse_mean:12.2e}" for s in cfg.solvers))

# roll-off: L/8 against L/2, windowed pursuit only
for frac in (0.125, 0.5):
    cfg = PRESETS["fig4"](L_w_frac=frac, trials=trials)
    result = run_sweep(cfg)
    emit_outputs(result, "demo_results")
    _, y = result.series("da_omp_rcos")
    print(f"\nL_w = {int(128 * frac)}: " + " ".join(f"{v:.2e}" for v in y))
