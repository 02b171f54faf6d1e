"""Windowed delay-aware dictionary ``Psi = [Phi_S, Phi_I]``."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import DDGridSpec, FrameSpec, build_window

DELAY_MODELS = ("linear", "cyclic")


def pilot_fingerprint(pilot: np.ndarray) -> str:
    data = np.ascontiguousarray(np.asarray(pilot, dtype=complex))
    return hashlib.sha1(data.tobytes()).hexdigest()[:12]


def column_index(l: int, k: int, grid: DDGridSpec) -> int:
    """Column of the (delay ``l``, Doppler ``k``) atom; ``l = G_tau`` is the interference block."""
    if not 0 <= l <= grid.G_tau:
        raise ValueError(f"delay index {l} outside [0, {grid.G_tau}]")
    if not 0 <= k < grid.G_nu:
        raise ValueError(f"Doppler index {k} outside [0, {grid.G_nu})")
    return l * grid.G_nu + k


def atoms(
    pilot: np.ndarray,
    frame: FrameSpec,
    window: np.ndarray,
    delay: int,
    kappa,
    delay_model: str = "linear",
) -> np.ndarray:
    """Windowed, delayed and Doppler-shifted pilot copies, one column per ``kappa``.

    ``"linear"`` delays the cyclically extended pilot the way the physical
    channel does, so noiseless on-grid receptions equal an atom exactly.
    ``"cyclic"`` shifts the windowed-length vector cyclically over ``L'``,
    which differs from ``"linear"`` only on the first ``delay`` samples.
    """
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    L = frame.L
    n = frame.window_times()
    if delay_model == "linear":
        src = n - delay
    elif delay_model == "cyclic":
        src = (np.arange(frame.L_prime) - delay) % frame.L_prime - frame.L_w // 2
    else:
        raise ValueError(f"unknown delay model {delay_model!r}")
    x = np.asarray(pilot, dtype=complex)[src % L]
    phase = np.exp(2j * np.pi * np.outer(src, kappa) / L)
    return (window * x)[:, None] * phase


@dataclass(frozen=True, eq=False)
class WindowedDictionary:
    """Dictionary matrix with its support (``I_S``) and interference (``I_I``) blocks.

    ``scale`` holds the per-column factor applied at build time (ones unless
    the columns were unit-normalized); solvers divide by it so coefficients
    always refer to the raw atoms.
    """

    psi: np.ndarray
    grid: DDGridSpec
    frame: FrameSpec
    window: np.ndarray
    pilot_id: str
    scale: np.ndarray
    interference_delay: int
    delay_model: str = "linear"

    @property
    def n_support(self) -> int:
        return self.grid.G_tau * self.grid.G_nu

    @property
    def I_S(self) -> range:
        return range(0, self.n_support)

    @property
    def I_I(self) -> range:
        return range(self.n_support, self.psi.shape[1])

    @property
    def normalized(self) -> bool:
        return not np.all(self.scale == 1.0)

    def cell(self, d: int) -> tuple[int, int]:
        """``(l, k)`` of column ``d``."""
        return divmod(int(d), self.grid.G_nu)


def build_dictionary(
    pilot: np.ndarray,
    frame: FrameSpec,
    grid: DDGridSpec,
    window: np.ndarray | None = None,
    *,
    normalize: bool = False,
    interference_delay: int | None = None,
    delay_model: str = "linear",
) -> WindowedDictionary:
    pilot = np.asarray(pilot, dtype=complex)
    if pilot.shape != (frame.L,):
        raise ValueError(f"pilot must have length L={frame.L}, got shape {pilot.shape}")
    if not np.any(pilot):
        raise ValueError("pilot must be nonzero")
    if window is None:
        window = build_window(frame)
    window = np.asarray(window, dtype=float)
    if window.shape != (frame.L_prime,):
        raise ValueError(f"window must have length L'={frame.L_prime}, got {window.shape}")
    if interference_delay is None:
        interference_delay = grid.G_tau
    if interference_delay < grid.G_tau:
        raise ValueError("interference block delay must be >= G_tau")

    kappa = grid.doppler(np.arange(grid.G_nu))
    delays = list(range(grid.G_tau)) + [interference_delay]
    psi = np.empty((frame.L_prime, (grid.G_tau + 1) * grid.G_nu), dtype=complex, order="F")
    for l, delay in enumerate(delays):
        psi[:, l * grid.G_nu:(l + 1) * grid.G_nu] = atoms(
            pilot, frame, window, delay, kappa, delay_model
        )
    scale = np.ones(psi.shape[1])
    if normalize:
        scale = np.linalg.norm(psi, axis=0)
        scale[scale == 0] = 1.0
        psi /= scale
    psi.setflags(write=False)
    scale.setflags(write=False)
    return WindowedDictionary(
        psi=psi,
        grid=grid,
        frame=frame,
        window=window,
        pilot_id=pilot_fingerprint(pilot),
        scale=scale,
        interference_delay=interference_delay,
        delay_model=delay_model,
    )


def correlate(dictionary: WindowedDictionary, residual: np.ndarray) -> np.ndarray:
    """``|Psi^H r|`` over every column."""
    residual = np.asarray(residual)
    if residual.shape != (dictionary.psi.shape[0],):
        raise ValueError(
            f"residual must have length {dictionary.psi.shape[0]}, got {residual.shape}"
        )
    return np.abs(dictionary.psi.conj().T @ residual)


def save_dictionary(dictionary: WindowedDictionary, path) -> None:
    """Write ``psi`` as CSV: one row per matrix row, ``re,im`` pairs per column.

    The first line is a ``#`` header with ``L_prime``, ``G_tau``, ``G_nu``,
    ``u_nu``, ``n_cols`` and ``pilot_id``.
    """
    psi = dictionary.psi
    g = dictionary.grid
    header = (
        f"L_prime={psi.shape[0]},G_tau={g.G_tau},G_nu={g.G_nu},u_nu={g.u_nu},"
        f"n_cols={psi.shape[1]},pilot_id={dictionary.pilot_id}"
    )
    pairs = np.empty((psi.shape[0], 2 * psi.shape[1]))
    pairs[:, 0::2] = psi.real
    pairs[:, 1::2] = psi.imag
    np.savetxt(Path(path), pairs, delimiter=",", fmt="%.17g", header=header)


def load_dictionary_matrix(path) -> tuple[np.ndarray, dict]:
    """Read a file written by :func:`save_dictionary`; returns ``(psi, header)``."""
    with open(path) as fh:
        first = fh.readline().lstrip("#").strip()
    meta = dict(item.split("=", 1) for item in first.split(","))
    pairs = np.loadtxt(path, delimiter=",", ndmin=2)
    psi = pairs[:, 0::2] + 1j * pairs[:, 1::2]
    return psi, meta
