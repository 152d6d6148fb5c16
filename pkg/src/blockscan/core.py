"""Data model, the size-penalized scan objective, and signal-strength thresholds.

Everything here is a pure function of its inputs: matrices are validated
dense float64 arrays, selections are immutable index-set pairs, and all
logarithms are natural logs.  Index sets are 0-based throughout the library;
only CLI/CSV artifacts use 1-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "Selection",
    "ScanResult",
    "PenaltyParams",
    "Thresholds",
    "as_matrix",
    "log_binom",
    "size_penalty",
    "size_penalty_approx",
    "submatrix_sum",
    "multiscale_objective",
    "localization_error",
    "critical_signal",
    "impossibility_threshold",
    "recovery_threshold",
    "recovery_constant",
    "signal_thresholds",
]


def as_matrix(values) -> np.ndarray:
    """Coerce `values` to a validated observation matrix.

    Returns a C-contiguous float64 array of shape (M, N) with M, N >= 1 and
    every entry finite.  Raises ValueError otherwise.
    """
    X = np.ascontiguousarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"observation matrix must be 2-D, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"observation matrix must be at least 1x1, got {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("observation matrix entries must all be finite")
    return X


@dataclass(frozen=True)
class Selection:
    """A candidate submatrix: sorted, duplicate-free row and column index sets."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(i) for i in self.rows))
        object.__setattr__(self, "cols", tuple(int(j) for j in self.cols))
        for name, idx in (("rows", self.rows), ("cols", self.cols)):
            if not idx:
                raise ValueError(f"selection {name} must be nonempty")
            if idx[0] < 0:
                raise ValueError(f"selection {name} contain a negative index")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"selection {name} must be strictly increasing")

    @classmethod
    def from_indices(cls, rows, cols) -> "Selection":
        """Build a Selection from arbitrary iterables (sorted, de-duplicated)."""
        return cls(tuple(sorted({int(i) for i in rows})), tuple(sorted({int(j) for j in cols})))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def validate_for(self, X: np.ndarray) -> None:
        M, N = X.shape
        if self.rows[-1] >= M:
            raise ValueError(f"row index {self.rows[-1]} out of range for {M} rows")
        if self.cols[-1] >= N:
            raise ValueError(f"column index {self.cols[-1]} out of range for {N} columns")


@dataclass(frozen=True)
class ScanResult:
    """A search outcome: the selection, its achieved objective, and diagnostics.

    `objective` is the size-penalized multiscale score for the adaptive
    searches and the exhaustive oracle; for the fixed-size LAS search it is
    the plain submatrix sum (that algorithm's own target).  `iterations`
    counts the algorithm's natural work unit (alternations, outer rounds, or
    objective evaluations); see each search function's docstring.
    """

    selection: Selection
    objective: float
    iterations: int
    restarts_used: int

    def __post_init__(self):
        if self.iterations < 0 or self.restarts_used < 0:
            raise ValueError("iteration and restart counts must be nonnegative")


@dataclass(frozen=True)
class PenaltyParams:
    """Size-penalty configuration.

    delta=0 gives the baseline penalty sqrt(2 log[M N C(M,m) C(N,n)]); any
    delta > 0 inflates the multiplier to (2 + delta), the heavier-tailed
    variant used outside the Gaussian setting.
    """

    delta: float = 0.0

    def __post_init__(self):
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be finite and >= 0, got {self.delta}")


_DEFAULT_PENALTY = PenaltyParams()


def log_binom(K, k):
    """log C(K, k) evaluated via log-gamma; accepts scalars or arrays."""
    K = np.asarray(K, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    out = gammaln(K + 1.0) - gammaln(k + 1.0) - gammaln(K - k + 1.0)
    return float(out) if out.ndim == 0 else out


def _check_sizes(M: int, N: int, m, n) -> None:
    if M < 1 or N < 1:
        raise ValueError(f"matrix dimensions must be positive, got ({M}, {N})")
    m = np.asarray(m)
    n = np.asarray(n)
    if np.any(m < 1) or np.any(m > M):
        raise ValueError(f"row count m must lie in [1, {M}]")
    if np.any(n < 1) or np.any(n > N):
        raise ValueError(f"column count n must lie in [1, {N}]")


def size_penalty(M: int, N: int, m, n, params: PenaltyParams = _DEFAULT_PENALTY):
    """Multiplicity penalty for scanning an m x n submatrix of an M x N matrix.

    sqrt((2 + delta) * [log M + log N + log C(M,m) + log C(N,n)]), with the
    log-binomials evaluated through log-gamma so large dimensions are exact.
    `m` and `n` may be scalars or broadcastable integer arrays.
    """
    _check_sizes(M, N, m, n)
    log_count = math.log(M) + math.log(N) + log_binom(M, m) + log_binom(N, n)
    out = np.sqrt((2.0 + params.delta) * np.asarray(log_count))
    return float(out) if out.ndim == 0 else out


def size_penalty_approx(M: int, N: int, m, n):
    """Closed-form penalty approximation sqrt(2[log M + log N + m log(M/m) + n log(N/n)]).

    Uses log C(K,k) ~ k log(K/k) for k << K; only the unimodality-landscape
    experiment uses this in place of the exact penalty.
    """
    _check_sizes(M, N, m, n)
    m = np.asarray(m, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    term = math.log(M) + math.log(N) + m * np.log(M / m) + n * np.log(N / n)
    out = np.sqrt(2.0 * term)
    return float(out) if out.ndim == 0 else out


def submatrix_sum(X: np.ndarray, s: Selection) -> float:
    """Sum of X over the selected rows x columns."""
    X = as_matrix(X)
    s.validate_for(X)
    return float(X[np.ix_(s.rows, s.cols)].sum())


def multiscale_objective(X: np.ndarray, s: Selection, params: PenaltyParams = _DEFAULT_PENALTY) -> float:
    """Size-penalized scan score of a selection.

    submatrix_sum / sqrt(|rows| * |cols|) - size_penalty(M, N, |rows|, |cols|).
    The global maximizer of this score over all nonempty selections is the
    size-adaptive estimate of the anomalous block.
    """
    X = as_matrix(X)
    s.validate_for(X)
    m, n = s.shape
    value = submatrix_sum(X, s)
    return value / math.sqrt(m * n) - size_penalty(X.shape[0], X.shape[1], m, n, params)


def localization_error(est: Selection, truth: Selection) -> float:
    """log(|est.rows symm-diff truth.rows| + |est.cols symm-diff truth.cols| + 1).

    Zero exactly when the two selections coincide; symmetric in its arguments.
    """
    d_rows = len(set(est.rows) ^ set(truth.rows))
    d_cols = len(set(est.cols) ^ set(truth.cols))
    return math.log(d_rows + d_cols + 1)


def _check_planted(M: int, N: int, m_star: int, n_star: int) -> None:
    if not (1 <= m_star < M):
        raise ValueError(f"m_star must satisfy 1 <= m_star < M, got m_star={m_star}, M={M}")
    if not (1 <= n_star < N):
        raise ValueError(f"n_star must satisfy 1 <= n_star < N, got n_star={n_star}, N={N}")


def critical_signal(M: int, N: int, m_star: int, n_star: int) -> float:
    """Critical per-entry signal level used to index simulation difficulty.

    max( sqrt(log M / n_star), sqrt(log N / m_star),
         sqrt((log M + log N) / (m_star + n_star)) ).
    """
    _check_planted(M, N, m_star, n_star)
    return max(
        math.sqrt(math.log(M) / n_star),
        math.sqrt(math.log(N) / m_star),
        math.sqrt((math.log(M) + math.log(N)) / (m_star + n_star)),
    )


def impossibility_threshold(M: int, N: int, m_star: int, n_star: int) -> float:
    """Signal level below which no strongly consistent estimator exists, even knowing the size.

    max over the row-structure, column-structure, and counting terms:
      [sqrt(2 log n*) + sqrt(2 log(N - n*))] / sqrt(m*),
      [sqrt(2 log m*) + sqrt(2 log(M - m*))] / sqrt(n*),
      sqrt(2 n* log(N/n*) + 2 m* log(M/m*)) / sqrt(m* n*).
    Requires every log argument above to exceed 1.
    """
    _check_planted(M, N, m_star, n_star)
    for name, value in (
        ("m_star", m_star),
        ("n_star", n_star),
        ("M - m_star", M - m_star),
        ("N - n_star", N - n_star),
    ):
        if value <= 1:
            raise ValueError(f"impossibility threshold needs {name} > 1, got {value}")
    t_rows = (math.sqrt(2 * math.log(n_star)) + math.sqrt(2 * math.log(N - n_star))) / math.sqrt(m_star)
    t_cols = (math.sqrt(2 * math.log(m_star)) + math.sqrt(2 * math.log(M - m_star))) / math.sqrt(n_star)
    t_count = math.sqrt(2 * n_star * math.log(N / n_star) + 2 * m_star * math.log(M / m_star)) / math.sqrt(
        m_star * n_star
    )
    return max(t_rows, t_cols, t_count)


def recovery_threshold(M: int, N: int, m_star: int, n_star: int) -> float:
    """Signal level above which the size-adaptive scan recovers the block exactly (w.h.p.).

    recovery_constant() times the max of two structure terms and the
    normalized size penalty lambda_{m*,n*} / sqrt(m* n*) (delta = 0).
    """
    _check_planted(M, N, m_star, n_star)
    t_rows = math.sqrt((math.log(M - m_star) + math.log(m_star)) / n_star)
    t_cols = math.sqrt((math.log(N - n_star) + math.log(n_star)) / m_star)
    t_pen = size_penalty(M, N, m_star, n_star) / math.sqrt(m_star * n_star)
    return recovery_constant() * max(t_rows, t_cols, t_pen)


def _recovery_rhs(c: float) -> float:
    r = c / (c - 1.0)
    return 2.0 * (r**1.5 + r**1.25)


@lru_cache(maxsize=1)
def recovery_constant() -> float:
    """The constant C > 1 solving C = 2([C/(C-1)]^1.5 + [C/(C-1)]^1.25).

    The right side is strictly decreasing in C on (1, inf), so the fixed
    point is unique; bisection on (1, 100] drives the residual below 1e-12.
    """
    lo, hi = 1.0 + 1e-9, 100.0
    if _recovery_rhs(hi) - hi >= 0.0:  # cannot happen; guards the bracket
        raise RuntimeError("fixed-point bracket failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _recovery_rhs(mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    c = 0.5 * (lo + hi)
    assert abs(_recovery_rhs(c) - c) < 1e-12
    return c


@dataclass(frozen=True)
class Thresholds:
    """The three reference signal levels and the recovery constant for one design."""

    impossibility: float
    recovery: float
    critical: float
    constant: float

    def __post_init__(self):
        for name in ("impossibility", "recovery", "critical", "constant"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"threshold {name} must be strictly positive")


def signal_thresholds(M: int, N: int, m_star: int, n_star: int) -> Thresholds:
    """All reference signal levels for a planted m* x n* block in an M x N matrix."""
    return Thresholds(
        impossibility=impossibility_threshold(M, N, m_star, n_star),
        recovery=recovery_threshold(M, N, m_star, n_star),
        critical=critical_signal(M, N, m_star, n_star),
        constant=recovery_constant(),
    )
