"""Delay-Doppler frame geometry, receiver window and channel-matrix builders.

Time-origin convention used throughout the package: sample index ``n = 0`` is
the first sample of the core pilot block (right after the cyclic prefix).  The
receiver window therefore covers ``n = -L_w/2, ..., L + L_w/2 - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class FrameSpec:
    """Pilot frame layout: CP, core block of ``L`` samples and cyclic suffix.

    The CP is ``ell_max + L_w/2`` samples long and the suffix ``L_w/2``, so
    that dropping ``ell_max`` received samples leaves a symmetric window of
    ``L + L_w`` samples around the core block.
    """

    L: int
    L_w: int = 0
    ell_max: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"pilot length must be positive, got L={self.L}")
        if self.L_w < 0 or self.L_w % 2:
            raise ValueError(f"roll-off length must be even and >= 0, got L_w={self.L_w}")
        if self.L_w > self.L:
            raise ValueError(f"roll-off length L_w={self.L_w} exceeds L={self.L}")
        if self.ell_max < 0:
            raise ValueError(f"ell_max must be >= 0, got {self.ell_max}")

    @property
    def L_cp(self) -> int:
        return self.ell_max + self.L_w // 2

    @property
    def L_cs(self) -> int:
        return self.L_w // 2

    @property
    def L_tot(self) -> int:
        return self.L + self.L_cp + self.L_cs

    @property
    def L_prime(self) -> int:
        """Receiver-window length, ``L_tot - ell_max = L + L_w``."""
        return self.L + self.L_w

    def window_times(self) -> np.ndarray:
        """Sample indices (core-block origin) covered by the receiver window."""
        return np.arange(self.L_prime) - self.L_w // 2

    def frame_times(self) -> np.ndarray:
        """Sample indices (core-block origin) of the transmitted frame."""
        return np.arange(self.L_tot) - self.L_cp


@dataclass(frozen=True)
class DDGridSpec:
    """Delay-Doppler grid, oversampled by ``u_nu`` along Doppler.

    Grid Doppler index ``k`` stands for the normalized Doppler ``k / u_nu``.
    """

    G_tau: int
    G_nu: int
    u_nu: int = 1

    def __post_init__(self):
        if self.G_tau < 1 or self.G_nu < 1 or self.u_nu < 1:
            raise ValueError(f"grid sizes must be positive, got {self}")

    @property
    def n_cells(self) -> int:
        return self.G_tau * self.G_nu

    @property
    def doppler_max(self) -> float:
        return (self.G_nu - 1) / self.u_nu

    def doppler(self, k) -> np.ndarray | float:
        return np.asarray(k) / self.u_nu


@dataclass(frozen=True)
class PathSet:
    """Multipath channel: complex gains, integer delays, fractional Dopplers."""

    gains: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    delays: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    dopplers: np.ndarray = field(default_factory=lambda: np.zeros(0, float))

    def __post_init__(self):
        gains = np.atleast_1d(np.asarray(self.gains, dtype=complex))
        delays = np.atleast_1d(np.asarray(self.delays))
        dopplers = np.atleast_1d(np.asarray(self.dopplers, dtype=float))
        if not (gains.shape == delays.shape == dopplers.shape) or gains.ndim != 1:
            raise ValueError("gains, delays and dopplers must be 1-D of equal length")
        if delays.size and not np.all(delays == np.round(delays)):
            raise ValueError("path delays must be integers")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "delays", delays.astype(int))
        object.__setattr__(self, "dopplers", dopplers)

    @classmethod
    def from_paths(cls, paths: Sequence[tuple[complex, int, float]]) -> "PathSet":
        if not paths:
            return cls()
        h, ell, kappa = zip(*paths)
        return cls(np.array(h), np.array(ell), np.array(kappa))

    @property
    def P(self) -> int:
        return self.gains.size

    def __len__(self) -> int:
        return self.P

    def __iter__(self) -> Iterator[tuple[complex, int, float]]:
        return iter(zip(self.gains, self.delays, self.dopplers))

    def union(self, other: "PathSet") -> "PathSet":
        return PathSet(
            np.concatenate([self.gains, other.gains]),
            np.concatenate([self.delays, other.delays]),
            np.concatenate([self.dopplers, other.dopplers]),
        )

    def grid_cells(self, grid: DDGridSpec) -> list[tuple[int, int]]:
        k = np.round(self.dopplers * grid.u_nu).astype(int)
        return list(zip(self.delays.tolist(), k.tolist()))

    def validate(self, grid: DDGridSpec) -> None:
        """Raise ``ValueError`` unless every path sits inside ``grid``."""
        if np.any(self.delays < 0) or np.any(self.delays > grid.G_tau - 1):
            raise ValueError(f"path delays {self.delays} outside [0, {grid.G_tau - 1}]")
        tol = 1e-12
        if np.any(self.dopplers < -tol) or np.any(self.dopplers > grid.doppler_max + tol):
            raise ValueError(f"path Dopplers outside [0, {grid.doppler_max}]")
        cells = self.grid_cells(grid)
        if len(set(cells)) != len(cells):
            raise ValueError("two paths share the same grid cell")


def build_window(frame: FrameSpec) -> np.ndarray:
    """Raised-cosine receiver window of length ``L + L_w``.

    The window is the discrete convolution of a length-``L`` rectangle with
    the half-sine pulse ``c[m] = pi/(2 L_w) sin(pi m / L_w)``, ``m = 0..L_w``,
    rescaled so the flat top is exactly one.  Both ramps are ``L_w`` samples
    long; ``L_w = 0`` gives the rectangular window.
    """
    L, L_w = frame.L, frame.L_w
    if L_w % 2 or L_w < 0 or L_w > L:
        raise ValueError(f"invalid roll-off length L_w={L_w} for L={L}")
    if L_w == 0:
        return np.ones(L)
    m = np.arange(L_w + 1)
    pulse = np.pi / (2 * L_w) * np.sin(np.pi * m / L_w)
    # the convolution ramp is the running sum of the pulse
    ramp = np.clip(np.cumsum(pulse)[:L_w] / pulse.sum(), 0.0, 1.0)
    return np.concatenate([ramp, np.ones(L - L_w), ramp[::-1]])


def extension_indices(L: int, n_prefix: int, n_suffix: int) -> np.ndarray:
    """Pilot indices selected by a cyclic extension with the given prefix/suffix."""
    return np.arange(-n_prefix, L + n_suffix) % L


def cyclic_extension(frame: FrameSpec, variant: str = "full") -> np.ndarray:
    """Cyclic-extension selection matrix.

    ``"full"`` stacks the last ``L_cp`` rows of ``I_L``, ``I_L`` and the first
    ``L_cs`` rows (``L_tot x L``).  ``"window_trimmed"`` keeps only the last
    ``L_cp - ell_max = L_w/2`` rows as prefix (``L' x L``).
    """
    if variant == "full":
        idx = extension_indices(frame.L, frame.L_cp, frame.L_cs)
    elif variant == "window_trimmed":
        idx = extension_indices(frame.L, frame.L_cp - frame.ell_max, frame.L_cs)
    else:
        raise ValueError(f"unknown cyclic-extension variant {variant!r}")
    T = np.zeros((idx.size, frame.L))
    T[np.arange(idx.size), idx] = 1.0
    return T


def permutation_power(size: int, ell: int) -> np.ndarray:
    """``ell``-step forward cyclic shift: ``(P v)[n] = v[(n - ell) mod size]``."""
    if not 0 <= ell < size:
        raise ValueError(f"shift {ell} outside [0, {size})")
    return np.roll(np.eye(size), ell, axis=0)


def doppler_phases(size: int, kappa: float, L: int, start_offset: int = 0) -> np.ndarray:
    return np.exp(2j * np.pi * kappa * (np.arange(size) + start_offset) / L)


def doppler_matrix(size: int, kappa: float, L: int, start_offset: int = 0) -> np.ndarray:
    """``diag{exp(j 2 pi (n + start_offset) kappa / L)}``, ``n = 0..size-1``."""
    if size < 1 or L < 1:
        raise ValueError("size and L must be positive")
    return np.diag(doppler_phases(size, kappa, L, start_offset))


def component_matrix(
    size: int, ell: int, kappa: float, L: int, start_offset: int = 0
) -> np.ndarray:
    """Single delay-Doppler shift component of a channel matrix.

    Row ``n`` holds ``exp(j 2 pi kappa (n - ell + start_offset) / L)`` in column
    ``(n - ell) mod size``: the Doppler phase follows the (linear) transmit time
    while the pilot index wraps cyclically.  For integer ``kappa`` with
    ``size == L`` this equals ``permutation_power(ell) @ doppler_matrix(kappa)``.
    """
    if not 0 <= ell < size:
        raise ValueError(f"shift {ell} outside [0, {size})")
    if L < 1:
        raise ValueError("L must be positive")
    n = np.arange(size)
    G = np.zeros((size, size), dtype=complex)
    G[n, (n - ell) % size] = np.exp(2j * np.pi * kappa * (n - ell + start_offset) / L)
    return G


def channel_matrix(
    paths: PathSet, size: int, L: int, start_offset: int = 0
) -> np.ndarray:
    """``H = sum_p h_p Gamma(ell_p, kappa_p)`` as a dense ``size x size`` matrix."""
    n = np.arange(size)
    H = np.zeros((size, size), dtype=complex)
    for h, ell, kappa in paths:
        if not 0 <= ell < size:
            raise ValueError(f"path delay {ell} outside [0, {size})")
        H[n, (n - ell) % size] += h * np.exp(
            2j * np.pi * kappa * (n - ell + start_offset) / L
        )
    return H
