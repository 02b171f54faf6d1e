"""Sample-level pilot transmission through a fractional-Doppler multipath channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DDGridSpec, FrameSpec, PathSet

GAIN_MODELS = ("complex_uniform_mag", "real_uniform")


@dataclass(frozen=True, eq=False)
class PilotSequence:
    x: np.ndarray
    seed: object = None

    @property
    def L(self) -> int:
        return self.x.size


def gen_pilot(L: int = 128, seed=None) -> PilotSequence:
    """Pseudo-noise BPSK pilot of length ``L``; equal seeds give equal pilots."""
    if L < 1:
        raise ValueError("pilot length must be positive")
    rng = np.random.default_rng(seed)
    x = 1.0 - 2.0 * rng.integers(0, 2, size=L)
    return PilotSequence(x.astype(complex), seed)


@dataclass(frozen=True)
class ChannelDrawConfig:
    """Random channel ensemble.

    ``delay_range`` and ``doppler_range`` default to the full grid,
    ``[0, G_tau - 1]`` and ``[0, (G_nu - 1) / u_nu]``.  With ``on_grid`` the
    Dopplers are drawn as integer multiples of the grid spacing instead.
    """

    P_range: tuple[int, int] = (5, 8)
    gain_model: str = "complex_uniform_mag"
    delay_range: tuple[int, int] | None = None
    doppler_range: tuple[float, float] | None = None
    on_grid: bool = False

    def __post_init__(self):
        lo, hi = self.P_range
        if lo < 0 or hi < lo:
            raise ValueError(f"invalid path-count range {self.P_range}")
        if self.gain_model not in GAIN_MODELS:
            raise ValueError(f"unknown gain model {self.gain_model!r}")

    def ranges(self, grid: DDGridSpec) -> tuple[tuple[int, int], tuple[float, float]]:
        delays = self.delay_range or (0, grid.G_tau - 1)
        dopplers = self.doppler_range or (0.0, grid.doppler_max)
        if not 0 <= delays[0] <= delays[1] <= grid.G_tau - 1:
            raise ValueError(f"delay range {delays} outside the grid")
        if not 0 <= dopplers[0] <= dopplers[1] <= grid.doppler_max + 1e-12:
            raise ValueError(f"Doppler range {dopplers} outside the grid")
        return delays, dopplers


def draw_channel(cfg: ChannelDrawConfig, grid: DDGridSpec, seed=None) -> PathSet:
    """Draw a random :class:`PathSet`; cells already taken are redrawn."""
    rng = np.random.default_rng(seed)
    (d_lo, d_hi), (k_lo, k_hi) = cfg.ranges(grid)
    cell_lo, cell_hi = round(k_lo * grid.u_nu), round(k_hi * grid.u_nu)
    n_cells = (d_hi - d_lo + 1) * (cell_hi - cell_lo + 1)
    if n_cells < cfg.P_range[1]:
        raise ValueError(f"grid hosts only {n_cells} cells, need {cfg.P_range[1]} distinct paths")

    P = int(rng.integers(cfg.P_range[0], cfg.P_range[1] + 1))
    taken = set()
    delays, dopplers = [], []
    while len(delays) < P:
        ell = int(rng.integers(d_lo, d_hi + 1))
        if cfg.on_grid:
            kappa = int(rng.integers(math.ceil(k_lo * grid.u_nu), math.floor(k_hi * grid.u_nu) + 1)) / grid.u_nu
        else:
            kappa = float(rng.uniform(k_lo, k_hi))
        cell = (ell, round(kappa * grid.u_nu))
        if cell in taken:
            continue
        taken.add(cell)
        delays.append(ell)
        dopplers.append(kappa)

    mag = rng.uniform(0.0, 1.0, size=P)
    if cfg.gain_model == "complex_uniform_mag":
        gains = mag * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=P))
    else:
        gains = mag.astype(complex)
    return PathSet(gains, np.array(delays, dtype=int), np.array(dopplers))


@dataclass(frozen=True)
class NoiseConfig:
    """AWGN level for a unit-power pilot; ``snr_db = inf`` is noiseless."""

    snr_db: float = math.inf

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.snr_db) and self.snr_db > 0

    @property
    def sigma2(self) -> float:
        return 0.0 if self.noiseless else 10.0 ** (-self.snr_db / 10.0)


def propagate(
    pilot: PilotSequence | np.ndarray,
    frame: FrameSpec,
    paths: PathSet,
    noise: NoiseConfig = NoiseConfig(),
    seed=None,
) -> np.ndarray:
    """Received frame ``r[n]``, ``n = -L_cp .. L + L_cs - 1``.

    Each path delays the cyclically extended pilot linearly and applies the
    Doppler phase ``exp(j 2 pi kappa (n - ell) / L)``.  Samples before the
    frame start are zero (a single frame is simulated).
    """
    x = np.asarray(getattr(pilot, "x", pilot), dtype=complex)
    if x.shape != (frame.L,):
        raise ValueError(f"pilot length {x.size} does not match L={frame.L}")
    if paths.P and paths.delays.max() > frame.ell_max:
        raise ValueError(f"path delay exceeds ell_max={frame.ell_max}")
    if paths.P and paths.delays.min() < 0:
        raise ValueError("negative path delay")
    L = frame.L
    n = frame.frame_times()
    r = np.zeros(frame.L_tot, dtype=complex)
    for h, ell, kappa in paths:
        src = n - ell
        valid = src >= -frame.L_cp
        r[valid] += h * np.exp(2j * np.pi * kappa * src[valid] / L) * x[src[valid] % L]
    if not noise.noiseless:
        rng = np.random.default_rng(seed)
        w = rng.standard_normal((2, frame.L_tot))
        r += np.sqrt(noise.sigma2 / 2) * (w[0] + 1j * w[1])
    return r


def receiver_front_end(
    r: np.ndarray,
    frame: FrameSpec,
    window: np.ndarray,
    tx_frame: FrameSpec | None = None,
) -> np.ndarray:
    """Drop the leading samples and apply the receiver window.

    ``r`` is a frame produced with ``tx_frame`` (``frame`` by default).  The
    output covers ``n = -L_w/2 .. L + L_w/2 - 1`` of the receive ``frame``, so
    a rectangular receiver (``L_w = 0``) can share a transmission with a
    windowed one.
    """
    tx = tx_frame or frame
    if tx.L != frame.L:
        raise ValueError("transmit and receive frames have different L")
    r = np.asarray(r)
    if r.shape != (tx.L_tot,):
        raise ValueError(f"received frame must have length {tx.L_tot}, got {r.shape}")
    window = np.asarray(window)
    if window.shape != (frame.L_prime,):
        raise ValueError(f"window must have length {frame.L_prime}")
    start = tx.L_cp - frame.L_w // 2
    if start < tx.ell_max or start + frame.L_prime > tx.L_tot:
        raise ValueError("receive window extends beyond the IBI-free part of the frame")
    return window * r[start:start + frame.L_prime]
