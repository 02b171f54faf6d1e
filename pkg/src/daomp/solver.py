"""Greedy sparse solvers: delay-aware OMP and the standard OMP baseline."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from .dictionary import WindowedDictionary
from .model import DDGridSpec, PathSet, channel_matrix

RANK_RTOL = 1e-10
# residual norms below this fraction of ||y|| are treated as exact zero
EXHAUSTED_RTOL = 1e-12

TRACE_COLUMNS = ("i", "d_i", "beta_i", "gamma_i", "residual_norm")


class RankDeficientError(np.linalg.LinAlgError):
    pass


def least_squares(A: np.ndarray, y: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Solve ``min ||y - A h||`` through a reduced QR factorization.

    Raises :class:`RankDeficientError` when a diagonal entry of ``R`` falls
    below ``rtol`` times the largest one.
    """
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[:, None]
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.size and diag.min() <= rtol * max(diag.max(), np.finfo(float).tiny):
        raise RankDeficientError(f"matrix of shape {A.shape} is rank deficient")
    return solve_triangular(R, Q.conj().T @ y)


class IncrementalLS:
    """Least squares over a growing column set via an updated QR factorization.

    Columns are orthogonalized with two passes of classical Gram-Schmidt,
    which keeps ``Q`` orthonormal to working precision.
    """

    def __init__(self, y: np.ndarray, max_cols: int, rtol: float = RANK_RTOL):
        self.y = np.asarray(y, dtype=complex)
        self.rtol = rtol
        m = self.y.size
        self._Q = np.zeros((m, max_cols), dtype=complex, order="F")
        self._R = np.zeros((max_cols, max_cols), dtype=complex)
        self._qty = np.zeros(max_cols, dtype=complex)
        self.k = 0
        self.residual = self.y.copy()

    def append(self, a: np.ndarray) -> None:
        k = self.k
        if k == self._Q.shape[1]:
            raise ValueError("column capacity exhausted")
        Q = self._Q[:, :k]
        v = np.array(a, dtype=complex)
        norm_a = np.linalg.norm(v)
        coef = np.zeros(k, dtype=complex)
        for _ in range(2):
            c = Q.conj().T @ v
            v -= Q @ c
            coef += c
        r_kk = np.linalg.norm(v)
        if norm_a == 0 or r_kk <= self.rtol * norm_a:
            raise RankDeficientError("new column lies in the span of the selected ones")
        q = v / r_kk
        self._Q[:, k] = q
        self._R[:k, k] = coef
        self._R[k, k] = r_kk
        self._qty[k] = q.conj() @ self.y
        self.residual = self.residual - q * self._qty[k]
        self.k = k + 1

    def coefficients(self) -> np.ndarray:
        k = self.k
        if k == 0:
            return np.zeros(0, dtype=complex)
        return solve_triangular(self._R[:k, :k], self._qty[:k])


class IterationRecord(NamedTuple):
    i: int
    d_i: int
    beta_i: float
    gamma_i: float
    residual_norm: float


@dataclass(frozen=True)
class StoppingRule:
    """How a greedy run decides to stop.

    ``variant`` is ``"interference_adaptive"``, ``"fixed_iterations"`` (with
    ``K``) or ``"residual_threshold"`` (with ``threshold``; ``None`` means
    ``L' * sigma2``).  ``cap`` bounds the support size in every variant;
    ``None`` resolves to ``min(L', G_tau * G_nu)``.
    """

    variant: str = "interference_adaptive"
    K: int | None = None
    threshold: float | None = None
    cap: int | None = None

    def __post_init__(self):
        if self.variant not in ("interference_adaptive", "fixed_iterations", "residual_threshold"):
            raise ValueError(f"unknown stopping rule {self.variant!r}")
        if self.variant == "fixed_iterations" and (self.K is None or self.K < 0):
            raise ValueError("fixed_iterations needs K >= 0")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be >= 1")

    @classmethod
    def interference(cls, cap=None):
        return cls("interference_adaptive", cap=cap)

    @classmethod
    def fixed(cls, K: int, cap=None):
        return cls("fixed_iterations", K=K, cap=cap)

    @classmethod
    def residual(cls, threshold=None, cap=None):
        return cls("residual_threshold", threshold=threshold, cap=cap)


@dataclass
class SparseEstimate:
    support: list[int] = field(default_factory=list)
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    trace: list[IterationRecord] = field(default_factory=list)
    stop_reason: str = "converged"
    exit_beta: float = 0.0
    exit_gamma: float = 0.0
    final_residual_norm: float = 0.0
    cap: int = 0
    grid: DDGridSpec | None = None
    correlations: list[np.ndarray] | None = None

    @property
    def Q(self) -> int:
        return len(self.support)

    @property
    def cap_hit(self) -> bool:
        return self.stop_reason == "cap"

    def cells(self) -> list[tuple[int, int]]:
        return [divmod(d, self.grid.G_nu) for d in self.support]

    def to_pathset(self) -> PathSet:
        if not self.support:
            return PathSet()
        l, k = np.array(self.cells()).T
        return PathSet(self.coefficients, l, k / self.grid.u_nu)


def default_cap(dictionary: WindowedDictionary) -> int:
    return min(dictionary.psi.shape[0], dictionary.n_support)


def _greedy(
    dictionary: WindowedDictionary,
    y: np.ndarray,
    rule: StoppingRule,
    sigma2: float = 0.0,
    keep_correlations: bool = False,
) -> SparseEstimate:
    psi = dictionary.psi
    y = np.asarray(y, dtype=complex)
    if y.shape != (psi.shape[0],):
        raise ValueError(f"measurement must have length {psi.shape[0]}, got {y.shape}")
    n_s = dictionary.n_support
    cap = rule.cap if rule.cap is not None else default_cap(dictionary)
    adaptive = rule.variant == "interference_adaptive"
    if rule.variant == "residual_threshold":
        threshold = rule.threshold
        if threshold is None:
            if not sigma2 > 0:
                raise ValueError("residual_threshold needs sigma2 > 0")
            threshold = psi.shape[0] * sigma2
    basis = psi if adaptive else psi[:, :n_s]
    basis_h = basis.conj().T

    est = SparseEstimate(cap=cap, grid=dictionary.grid)
    if keep_correlations:
        est.correlations = []
    ls = IncrementalLS(y, cap)
    y_norm = np.linalg.norm(y)
    gamma = 0.0
    i = 0
    while True:
        r = ls.residual
        r_norm = float(np.linalg.norm(r))
        corr = np.abs(basis_h @ r)
        if keep_correlations:
            est.correlations.append(corr)
        d = int(np.argmax(corr[:n_s]))
        beta = float(corr[d])
        if adaptive and i > 0:
            gamma = float(corr[n_s:].max())
        est.exit_beta, est.exit_gamma = beta, gamma

        if adaptive and not beta > gamma:
            est.stop_reason = "converged"
            break
        if rule.variant == "fixed_iterations" and i >= rule.K:
            est.stop_reason = "converged"
            break
        if rule.variant == "residual_threshold" and r_norm**2 <= threshold:
            est.stop_reason = "converged"
            break
        if r_norm <= EXHAUSTED_RTOL * y_norm or beta == 0.0:
            est.stop_reason = "exhausted"
            break
        if i >= cap:
            est.stop_reason = "cap"
            break
        try:
            ls.append(psi[:, d])
        except RankDeficientError:
            est.stop_reason = "rank_deficient"
            break
        est.trace.append(IterationRecord(i, d, beta, gamma, r_norm))
        est.support.append(d)
        i += 1

    est.final_residual_norm = float(np.linalg.norm(ls.residual))
    coef = ls.coefficients()
    est.coefficients = coef / dictionary.scale[est.support] if est.support else coef
    return est


def da_omp(
    dictionary: WindowedDictionary,
    y: np.ndarray,
    cap: int | None = None,
    keep_correlations: bool = False,
) -> SparseEstimate:
    """Delay-aware OMP.

    Keeps selecting the support column most correlated with the residual
    while that correlation exceeds the largest interference-block correlation
    of the same residual (taken as zero before the first selection).  The
    returned coefficients are the least-squares fit over the whole selected
    support.
    """
    return _greedy(dictionary, y, StoppingRule.interference(cap), keep_correlations=keep_correlations)


def omp_baseline(
    dictionary: WindowedDictionary,
    y: np.ndarray,
    rule: StoppingRule,
    sigma2: float = 0.0,
    keep_correlations: bool = False,
) -> SparseEstimate:
    """Standard OMP over the support block only (interference block ignored)."""
    if rule.variant == "interference_adaptive":
        raise ValueError("use da_omp for the interference-adaptive rule")
    return _greedy(dictionary, y, rule, sigma2, keep_correlations)


def reconstruct_channel(est: SparseEstimate, grid: DDGridSpec, L: int) -> np.ndarray:
    """On-grid channel ``sum_q h_q Gamma(l_q, k_q / u_nu)`` as an ``L x L`` matrix."""
    if any(d >= grid.n_cells or d < 0 for d in est.support):
        raise ValueError("estimate support must lie in the support block")
    if not est.support:
        return np.zeros((L, L), dtype=complex)
    l, k = np.divmod(np.asarray(est.support), grid.G_nu)
    return channel_matrix(PathSet(est.coefficients, l, k / grid.u_nu), L, L)


def write_trace_csv(est: SparseEstimate, path) -> None:
    """Per-iteration rows ``i,d_i,beta_i,gamma_i,residual_norm``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in est.trace:
            writer.writerow([rec.i, rec.d_i, repr(rec.beta_i), repr(rec.gamma_i), repr(rec.residual_norm)])
