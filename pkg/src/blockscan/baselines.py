"""Comparison methods: spectral localization and the greatest-marginal-gap split.

Both are deterministic functions of the data (the spectral method re-seeds
its start vector only when power iteration detects a degenerate direction),
return valid nonempty selections for any matrix with at least two rows and
columns, and carry no notion of the planted size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Selection, as_matrix

__all__ = ["SpectralConfig", "PowerIterationError", "spectral_localize", "gmg_localize"]


@dataclass(frozen=True)
class SpectralConfig:
    power_iter_tolerance: float = 1e-8
    power_iter_max: int = 1000

    def __post_init__(self):
        if not self.power_iter_tolerance > 0.0:
            raise ValueError("power_iter_tolerance must be positive")
        if self.power_iter_max < 1:
            raise ValueError("power_iter_max must be positive")


class PowerIterationError(RuntimeError):
    """Leading singular vector failed to stabilize within the iteration cap."""

    def __init__(self, message: str, last_iterate: np.ndarray):
        super().__init__(message)
        self.last_iterate = last_iterate


def _leading_singular_pair(X: np.ndarray, cfg: SpectralConfig) -> tuple[np.ndarray, np.ndarray]:
    """Leading left/right singular vectors by power iteration on X^T X.

    Starts from the normalized all-ones vector; if an iterate is annihilated
    (image norm ~ 0), retries from a fixed-seed random direction a few times
    before falling back to the uniform vector (the all-zeros matrix ends up
    there).  Convergence is measured up to sign.
    """
    M, N = X.shape
    v = np.full(N, 1.0 / math.sqrt(N))
    reseed_rng = np.random.default_rng(0)
    reseeds = 0
    for _ in range(cfg.power_iter_max):
        w = X.T @ (X @ v)
        norm = float(np.linalg.norm(w))
        if norm <= 1e-300:
            if reseeds < 3:
                reseeds += 1
                v = reseed_rng.standard_normal(N)
                v /= np.linalg.norm(v)
                continue
            break  # X maps every direction to ~0; the uniform v is as good as any
        w /= norm
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < cfg.power_iter_tolerance:
            v = w
            break
        v = w
    else:
        raise PowerIterationError(
            f"power iteration did not stabilize within {cfg.power_iter_max} iterations", v
        )
    u = X @ v
    norm = float(np.linalg.norm(u))
    u = np.full(M, 1.0 / math.sqrt(M)) if norm <= 1e-300 else u / norm
    return u, v


def _two_means_split(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact 1-D 2-means via the best split of the sorted values.

    Optimal 2-means clusters on a line are contiguous in sorted order, so
    scanning the n-1 split points with prefix sums finds the global optimum;
    ties take the smallest split.  Returns (low indices, high indices).
    """
    n = values.size
    order = np.argsort(values, kind="stable")
    x = values[order]
    ps = np.cumsum(x)
    ss = np.cumsum(x * x)
    ks = np.arange(1, n)
    left = ss[:-1] - ps[:-1] ** 2 / ks
    right = (ss[-1] - ss[:-1]) - (ps[-1] - ps[:-1]) ** 2 / (n - ks)
    k = int(np.argmin(left + right)) + 1
    return np.sort(order[:k]), np.sort(order[k:])


def spectral_localize(X, cfg: SpectralConfig = SpectralConfig()) -> Selection:
    """Localize via the leading singular pair plus 1-D 2-means on each side.

    Rows are clustered on the left singular vector entries, columns on the
    right; of the four cluster-product blocks, the one with the largest mean
    entry is returned (the anomaly has a positive mean shift).  The sign
    ambiguity of singular vectors is irrelevant under this selection rule.
    """
    X = as_matrix(X)
    M, N = X.shape
    if M < 2 or N < 2:
        raise ValueError(f"spectral localization needs at least a 2x2 matrix, got {X.shape}")
    u, v = _leading_singular_pair(X, cfg)
    row_lo, row_hi = _two_means_split(u)
    col_lo, col_hi = _two_means_split(v)
    best = None
    for r in (row_hi, row_lo):
        for c in (col_hi, col_lo):
            mean = float(X[np.ix_(r, c)].mean())
            if best is None or mean > best[0]:
                best = (mean, r, c)
    return Selection(tuple(int(i) for i in best[1]), tuple(int(j) for j in best[2]))


def gmg_localize(X) -> Selection:
    """Split rows and columns at the greatest gap in their sorted marginal sums.

    Keeps the indices on the upper (larger-sum) side of each gap; gap ties
    take the smallest split point.  Adding a constant to every entry shifts
    all marginal sums uniformly and leaves the output unchanged.
    """
    X = as_matrix(X)
    M, N = X.shape
    if M < 2 or N < 2:
        raise ValueError(f"marginal-gap localization needs at least a 2x2 matrix, got {X.shape}")

    def upper_side(sums: np.ndarray) -> tuple[int, ...]:
        order = np.argsort(sums, kind="stable")
        gaps = np.diff(sums[order])
        split = int(np.argmax(gaps))
        return tuple(int(i) for i in np.sort(order[split + 1 :]))

    return Selection(upper_side(X.sum(axis=1)), upper_side(X.sum(axis=0)))
