"""
Receiver window and the delay-aware dictionary
==============================================

Builds the raised-cosine receive window for a 128-sample pilot, then the
dictionary of windowed, delayed and Doppler-shifted pilot copies, and checks
that a simulated noiseless path lands exactly on its column.
"""

import numpy as np

from daomp import DDGridSpec, FrameSpec, PathSet, build_dictionary, build_window, gen_pilot
from daomp.channel import propagate, receiver_front_end
from daomp.dictionary import column_index, correlate

# frame: L = 128 pilot samples, roll-off L_w = 64, delays up to 4 samples
frame = FrameSpec(L=128, L_w=64, ell_max=4)
print("CP", frame.L_cp, "CS", frame.L_cs, "frame", frame.L_tot, "window", frame.L_prime)

w = build_window(frame)
# flat top in the middle, half-cosine ramps of L_w samples at both ends
print("ramp head:", np.round(w[:6], 4))
print("flat samples:", int(np.sum(w == 1.0)))

# 4 delay bins, 16 Doppler bins at half-bin spacing
grid = DDGridSpec(G_tau=4, G_nu=16, u_nu=2)
pilot = gen_pilot(128, seed=0)
D = build_dictionary(pilot.x, frame, grid)
print("dictionary", D.psi.shape, "support block", len(D.I_S), "interference block", len(D.I_I))

# one on-grid path at delay 2, Doppler 4.5 bins
paths = PathSet([0.9 * np.exp(0.3j)], [2], [4.5])
y = receiver_front_end(propagate(pilot, frame, paths), frame, w)
d = column_index(2, 9, grid)
print("matches column", d, ":", np.allclose(y, paths.gains[0] * D.psi[:, d]))

# the interference block sits at an impossible delay, so it sees only leakage
c = correlate(D, y)
print("max |corr| support %.1f, interference %.1f" % (c[D.I_S].max(), c[D.I_I].max()))

# an off-grid Doppler leaks into neighbouring columns; the window keeps it local
paths = PathSet([1.0], [0], [4.25])
y = receiver_front_end(propagate(pilot, frame, paths), frame, w)
c = correlate(D, y)[:16]
print("delay-0 row, normalized:", np.round(c / c.max(), 2))
