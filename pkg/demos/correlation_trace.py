"""
Watching the stopping rule
==========================

Two paths at delay 0 on a single-delay, 128-bin Doppler grid.  At each
iteration the support block (columns 0..127) and the interference block
(128..255) are correlated with the residual; the loop ends when the
interference block catches up.
"""

import sys
import tempfile

import numpy as np

from daomp.harness import fig2_trace, trace_experiment, write_trace

cfg = fig2_trace(seed=int(sys.argv[1]) if len(sys.argv) > 1 else 0)
res = trace_experiment(cfg)
for h, ell, kappa in res.paths:
    print(f"path |h|={abs(h):.2f} Doppler={kappa:.2f}")

for window in ("rcos", "rect"):
    print(f"\n{window}: stops at i={res.stop_iteration(window)}")
    for i, corr in enumerate(res.correlations(window)):
        beta, gamma = corr[: res.n_support].max(), corr[res.n_support:].max()
        print(f"  i={i}  peak d={int(np.argmax(corr)):3d}  beta={beta:7.2f}  gamma={gamma:6.2f}")

# tally over many channels
stops = np.array([
    [r.stop_iteration("rcos"), r.stop_iteration("rect")]
    for r in (trace_experiment(cfg.replace(seed=s)) for s in range(100))
])
print("\nrcos stops no later than rect in %d/100 channels" % np.sum(stops[:, 0] <= stops[:, 1]))
print("mean stop iteration rcos %.1f, rect %.1f" % tuple(stops.mean(axis=0)))

out = tempfile.mkdtemp()
print("\ncorrelation dump:", write_trace(res, out, name=cfg.name)["csv"])
