"""Search algorithms for the largest-average / size-penalized submatrix problem.

Four entry points:

* `las` — alternating top-k search at a fixed target size (the classic
  Large Average Submatrix hill climb).
* `adaptive_las` — LAS extended with a size-re-optimization half-step on
  each axis, maximizing the size-penalized multiscale objective; multiple
  random restarts, best kept.
* `gss` — two-dimensional golden-section search over the size grid, with a
  discrete stopping guard and an exhaustive sweep of the final frame.
* `exhaustive_search` — exact maximizer of the multiscale objective by row
  subset enumeration (guarded to M <= 20); the oracle the heuristics are
  judged against.

All tie-breaking is deterministic (toward smaller indices / smaller sizes)
unless a config's `random_ties` flag is set, so fixed seeds reproduce results
exactly at any parallelism level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    PenaltyParams,
    ScanResult,
    Selection,
    as_matrix,
    log_binom,
    multiscale_objective,
    size_penalty,
)

__all__ = [
    "LasConfig",
    "AdaptiveConfig",
    "GssConfig",
    "las",
    "adaptive_las",
    "gss",
    "fixed_size_scan",
    "exhaustive_search",
    "EXHAUSTIVE_MAX_ROWS",
]

EXHAUSTIVE_MAX_ROWS = 20

_DEFAULT_PENALTY = PenaltyParams()


@dataclass(frozen=True)
class LasConfig:
    """Fixed-size search: target size (m, n), initial rows, iteration cap."""

    m: int
    n: int
    init_rows: tuple[int, ...] | str = "random"
    max_iterations: int = 100
    random_ties: bool = False

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"target size must be positive, got ({self.m}, {self.n})")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if isinstance(self.init_rows, str):
            if self.init_rows != "random":
                raise ValueError(f"init_rows must be an index tuple or 'random', got {self.init_rows!r}")
        else:
            object.__setattr__(self, "init_rows", tuple(int(i) for i in self.init_rows))
            if len(self.init_rows) != self.m:
                raise ValueError(f"init_rows must have exactly m={self.m} entries")
            if len(set(self.init_rows)) != self.m or any(i < 0 for i in self.init_rows):
                raise ValueError("init_rows must be distinct nonnegative indices")


@dataclass(frozen=True)
class AdaptiveConfig:
    """Size-adaptive search: initial size, restart count, outer-iteration cap."""

    m0: int = 25
    n0: int = 25
    restarts: int = 50
    max_outer_iterations: int = 100
    penalty: PenaltyParams = _DEFAULT_PENALTY
    las_max_iterations: int = 100
    random_ties: bool = False

    def __post_init__(self):
        if self.m0 < 1 or self.n0 < 1:
            raise ValueError(f"initial size must be positive, got ({self.m0}, {self.n0})")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be positive")


@dataclass(frozen=True)
class GssConfig:
    """Golden-section size search: frame upper bounds and inner scan restarts."""

    m_bar: int
    n_bar: int
    inner_las_restarts: int = 1
    penalty: PenaltyParams = _DEFAULT_PENALTY
    las_max_iterations: int = 100

    def __post_init__(self):
        if self.m_bar < 1 or self.n_bar < 1:
            raise ValueError(f"frame bounds must be positive, got ({self.m_bar}, {self.n_bar})")
        if self.inner_las_restarts < 1:
            raise ValueError("inner_las_restarts must be positive")


def _desc_order(values: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Indices of `values` in descending order; ties toward the smaller index,
    or uniformly randomized when `rng` is given."""
    if rng is None:
        return np.argsort(-values, kind="stable")
    perm = rng.permutation(values.size)
    return perm[np.argsort(-values[perm], kind="stable")]


def _col_sums(X: np.ndarray, rows: np.ndarray) -> np.ndarray:
    # BLAS matvec beats a fancy-index gather once the subset is a sizable
    # fraction of the axis.
    if rows.size * 4 > X.shape[0]:
        w = np.zeros(X.shape[0])
        w[rows] = 1.0
        return w @ X
    return X[rows].sum(axis=0)


def _las_engine(X, Xt, m, n, rows, max_iterations, tie_rng=None, trace=None):
    """Alternate exact top-k column/row updates until the row set repeats.

    The column set is a deterministic function of the row set (and vice
    versa), so an unchanged row set after a full alternation certifies a
    fixed point.  Returns (rows, cols, iterations).
    """
    cols = None
    iterations = 0
    for _ in range(max_iterations):
        iterations += 1
        S = _col_sums(X, rows)
        cols = np.sort(_desc_order(S, tie_rng)[:n])
        T = _col_sums(Xt, cols)
        new_rows = np.sort(_desc_order(T, tie_rng)[:m])
        if trace is not None:
            trace.append(float(X[np.ix_(rows, cols)].sum()))
            trace.append(float(X[np.ix_(new_rows, cols)].sum()))
        converged = np.array_equal(new_rows, rows)
        rows = new_rows
        if converged:
            break  # with random ties this stop is heuristic; the cap guards cycles
    return rows, cols, iterations


def las(X, cfg: LasConfig, rng=None, trace=None) -> ScanResult:
    """Fixed-size alternating search for a large-average m x n submatrix.

    Starting from the configured rows (or a uniformly random m-subset),
    repeatedly take the n columns with the largest sums over the current
    rows, then the m rows with the largest sums over those columns, until
    the pair stabilizes or `max_iterations` is hit.  Each half-step is an
    exact top-k maximization, so the submatrix sum never decreases.

    Returns the selection with `objective` = its submatrix sum (the
    fixed-size scan value) and `iterations` = full alternations performed.
    If `trace` is a list, the running sum is appended after every half-step.
    """
    X = as_matrix(X)
    M, N = X.shape
    if cfg.m > M or cfg.n > N:
        raise ValueError(f"target size ({cfg.m}, {cfg.n}) exceeds matrix shape ({M}, {N})")
    rng = np.random.default_rng(rng)
    if isinstance(cfg.init_rows, str):
        rows0 = np.sort(rng.choice(M, cfg.m, replace=False))
    else:
        if max(cfg.init_rows) >= M:
            raise ValueError(f"init_rows out of range for {M} rows")
        rows0 = np.asarray(cfg.init_rows, dtype=np.intp)
    Xt = np.ascontiguousarray(X.T)
    tie_rng = rng if cfg.random_ties else None
    rows, cols, iterations = _las_engine(X, Xt, cfg.m, cfg.n, rows0, cfg.max_iterations, tie_rng, trace)
    sel = Selection(tuple(int(i) for i in rows), tuple(int(j) for j in cols))
    return ScanResult(sel, float(X[np.ix_(rows, cols)].sum()), iterations, 1)


def adaptive_las(X, cfg: AdaptiveConfig = AdaptiveConfig(), seed=None, trace=None) -> ScanResult:
    """Size-adaptive hill climb maximizing the multiscale objective.

    Each restart seeds a fixed-size LAS run at (m0, n0) from uniformly random
    rows, then alternates two exact conditional maximizations until the pair
    of index sets repeats: with rows fixed, pick the column count and set
    maximizing the penalized prefix score of the sorted column sums; then the
    symmetric row step.  Every half-step maximizes the multiscale objective
    over one index set with the other fixed (the prefix score *is* that
    objective evaluated at the top-j set), so the objective is non-decreasing
    within a restart.

    The best selection across restarts is returned, ties broken toward the
    smaller total size, then lexicographically.  `iterations` reports the
    outer iterations used by the winning restart.  If `trace` is a list, the
    objective is appended after the seeding run and after every half-step.
    """
    X = as_matrix(X)
    M, N = X.shape
    if cfg.m0 > M or cfg.n0 > N:
        raise ValueError(f"initial size ({cfg.m0}, {cfg.n0}) exceeds matrix shape ({M}, {N})")
    rng = np.random.default_rng(seed)
    Xt = np.ascontiguousarray(X.T)

    coef = 2.0 + cfg.penalty.delta
    base = math.log(M) + math.log(N)
    lbm = log_binom(M, np.arange(M + 1))
    lbn = log_binom(N, np.arange(N + 1))
    sqrt_js = np.sqrt(np.arange(1, N + 1))
    sqrt_is = np.sqrt(np.arange(1, M + 1))

    best_key = None
    best: tuple[Selection, float, int] | None = None
    for _ in range(cfg.restarts):
        rows0 = np.sort(rng.choice(M, cfg.m0, replace=False))
        tie_rng = rng if cfg.random_ties else None
        rows, cols, _ = _las_engine(X, Xt, cfg.m0, cfg.n0, rows0, cfg.las_max_iterations, tie_rng)
        if trace is not None:
            seed_sel = Selection(tuple(int(i) for i in rows), tuple(int(j) for j in cols))
            trace.append(multiscale_objective(X, seed_sel, cfg.penalty))
        outer = 0
        while outer < cfg.max_outer_iterations:
            outer += 1
            state = (rows.tobytes(), cols.tobytes())

            S = _col_sums(X, rows)
            order = _desc_order(S, tie_rng)
            scores = np.cumsum(S[order]) / (math.sqrt(rows.size) * sqrt_js)
            scores -= np.sqrt(coef * (base + lbm[rows.size] + lbn[1:]))
            j = int(np.argmax(scores)) + 1
            cols = np.sort(order[:j])
            if trace is not None:
                trace.append(float(scores[j - 1]))

            T = _col_sums(Xt, cols)
            order = _desc_order(T, tie_rng)
            scores = np.cumsum(T[order]) / (math.sqrt(cols.size) * sqrt_is)
            scores -= np.sqrt(coef * (base + lbm[1:] + lbn[cols.size]))
            i = int(np.argmax(scores)) + 1
            rows = np.sort(order[:i])
            if trace is not None:
                trace.append(float(scores[i - 1]))

            if (rows.tobytes(), cols.tobytes()) == state:
                break

        sel = Selection(tuple(int(r) for r in rows), tuple(int(c) for c in cols))
        obj = multiscale_objective(X, sel, cfg.penalty)
        key = (-obj, rows.size + cols.size, sel.rows, sel.cols)
        if best_key is None or key < best_key:
            best_key, best = key, (sel, obj, outer)

    sel, obj, outer = best
    return ScanResult(sel, obj, outer, cfg.restarts)


def fixed_size_scan(X, m: int, n: int, restarts: int = 1, rng=None, max_iterations: int = 100) -> ScanResult:
    """Best-of-restarts LAS estimate of the largest m x n submatrix sum.

    With restarts == 1 the single run starts from the m rows with the largest
    full-row sums (deterministic); otherwise every run starts from an
    independent uniformly random row set and the largest sum wins.
    """
    X = as_matrix(X)
    Xt = np.ascontiguousarray(X.T)
    det_order = _desc_order(X.sum(axis=1))
    rng = np.random.default_rng(rng)
    value, rows, cols, iterations = _scan_fixed(X, Xt, det_order, m, n, restarts, rng, max_iterations)
    return ScanResult(Selection(rows, cols), value, iterations, restarts)


def _scan_fixed(X, Xt, det_order, m, n, restarts, rng, max_iterations):
    """Shared inner loop for fixed_size_scan / gss / the unimodality grid."""
    M, N = X.shape
    if not (1 <= m <= M and 1 <= n <= N):
        raise ValueError(f"scan size ({m}, {n}) out of range for ({M}, {N})")
    best = None
    total_iter = 0
    for r in range(restarts):
        if restarts == 1:
            rows0 = np.sort(det_order[:m])
        else:
            rows0 = np.sort(rng.choice(M, m, replace=False))
        rows, cols, iters = _las_engine(X, Xt, m, n, rows0, max_iterations)
        total_iter += iters
        value = float(X[np.ix_(rows, cols)].sum())
        if best is None or value > best[0]:
            best = (value, tuple(int(i) for i in rows), tuple(int(j) for j in cols))
    return best[0], best[1], best[2], total_iter


_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


def _probe_pair(lo: int, hi: int) -> tuple[int, int]:
    """Golden-ratio interior probes of [lo, hi], lower rounded up, upper down.

    At widths 4, 6 and 8 the rounding collapses both probes onto the
    midpoint (and at widths 1 and 3 they cross), which would leave the
    contraction rule directionless; bumping the upper probe one step right
    restores the two-distinct-points invariant golden-section relies on.
    """
    width = hi - lo
    p1 = math.ceil(hi - width * _GOLDEN)
    p2 = math.floor(lo + width * _GOLDEN)
    if p2 <= p1:
        p2 = min(p1 + 1, hi)
    return p1, p2


def gss(X, cfg: GssConfig, seed=None, frame_trace=None) -> ScanResult:
    """Two-dimensional golden-section search over candidate sizes.

    Maintains a frame [m_lo, m_hi] x [n_lo, n_hi] starting at
    [1, m_bar] x [1, n_bar].  Each round probes the two golden-ratio interior
    points per axis (lower probe rounded up, upper probe rounded down),
    scores all four size combinations, and contracts every axis whose width
    still exceeds 3: past the upper probe if the best combination used the
    lower one, and below the lower probe otherwise.  Axes at width <= 3 are
    left to the final sweep, which scores every remaining size exactly once
    and returns the winner's selection.

    The size score is the penalized scan value: the best submatrix sum found
    by LAS at that size (deterministic largest-row-sums start when
    `inner_las_restarts` == 1, random starts otherwise), normalized by
    sqrt(m n), minus the exact size penalty.  Scores are memoized, so
    `iterations` in the result counts distinct size evaluations.  If
    `frame_trace` is a list, the frame bounds are appended each round.
    """
    X = as_matrix(X)
    M, N = X.shape
    if cfg.m_bar > M:
        raise ValueError(f"m_bar={cfg.m_bar} exceeds the matrix row count {M}")
    if cfg.n_bar > N:
        raise ValueError(f"n_bar={cfg.n_bar} exceeds the matrix column count {N}")
    rng = np.random.default_rng(seed)
    Xt = np.ascontiguousarray(X.T)
    det_order = _desc_order(X.sum(axis=1))

    memo: dict[tuple[int, int], tuple[float, tuple[int, ...], tuple[int, ...]]] = {}

    def evaluate(m: int, n: int):
        got = memo.get((m, n))
        if got is None:
            value, rows, cols, _ = _scan_fixed(
                X, Xt, det_order, m, n, cfg.inner_las_restarts, rng, cfg.las_max_iterations
            )
            score = value / math.sqrt(m * n) - size_penalty(M, N, m, n, cfg.penalty)
            got = memo[(m, n)] = (score, rows, cols)
        return got

    m_lo, m_hi = 1, cfg.m_bar
    n_lo, n_hi = 1, cfg.n_bar
    while max(m_hi - m_lo, n_hi - n_lo) > 3:
        if frame_trace is not None:
            frame_trace.append((m_lo, m_hi, n_lo, n_hi))
        m1, m2 = _probe_pair(m_lo, m_hi)
        n1, n2 = _probe_pair(n_lo, n_hi)
        best_mn = None
        best_score = -math.inf
        for mm, nn in ((m1, n1), (m1, n2), (m2, n1), (m2, n2)):
            score = evaluate(mm, nn)[0]
            if score > best_score:
                best_score, best_mn = score, (mm, nn)
        # Only axes wider than the stopping guard contract; narrower axes
        # would have crossed probes (ceil/floor overlap) and are swept below.
        if m_hi - m_lo > 3:
            if best_mn[0] == m1:
                m_hi = m2
            else:
                m_lo = m1
        if n_hi - n_lo > 3:
            if best_mn[1] == n1:
                n_hi = n2
            else:
                n_lo = n1
    if frame_trace is not None:
        frame_trace.append((m_lo, m_hi, n_lo, n_hi))

    best = None
    for mm in range(m_lo, m_hi + 1):
        for nn in range(n_lo, n_hi + 1):
            score, rows, cols = evaluate(mm, nn)
            if best is None or score > best[0]:
                best = (score, rows, cols)
    score, rows, cols = best
    return ScanResult(Selection(rows, cols), score, len(memo), cfg.inner_las_restarts)


def exhaustive_search(X, params: PenaltyParams = _DEFAULT_PENALTY) -> ScanResult:
    """Exact maximizer of the multiscale objective over all nonempty selections.

    Enumerates the 2^M - 1 nonempty row subsets in Gray-code order,
    maintaining running column sums; for a fixed row set the best column set
    of each cardinality is a prefix of the sorted column sums, so the inner
    maximization is a sort plus a penalized prefix scan.  Refuses matrices
    with more than 20 rows (transpose the input when N < M).  Ties resolve
    to the lexicographically smallest selection; the winning objective is
    recomputed exactly before returning.
    """
    X = as_matrix(X)
    M, N = X.shape
    if M > EXHAUSTIVE_MAX_ROWS:
        raise ValueError(
            f"exhaustive search enumerates all 2^M - 1 row subsets and is limited to "
            f"M <= {EXHAUSTIVE_MAX_ROWS} rows, got M={M}; transpose the matrix when N < M"
        )
    coef = 2.0 + params.delta
    base = math.log(M) + math.log(N)
    lam = np.sqrt(coef * (base + log_binom(M, np.arange(M + 1))[:, None] + log_binom(N, np.arange(N + 1))[None, :]))
    sqrt_ns = np.sqrt(np.arange(1, N + 1))

    members = np.zeros(M, dtype=bool)
    col_sums = np.zeros(N)
    m = 0
    best_obj = -math.inf
    best_sel: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for g in range(1, 1 << M):
        i = (g & -g).bit_length() - 1  # Gray code: one row enters or leaves per step
        if members[i]:
            members[i] = False
            col_sums -= X[i]
            m -= 1
        else:
            members[i] = True
            col_sums += X[i]
            m += 1
        if g % 256 == 0:  # cap round-off drift from the incremental updates
            col_sums = X[members].sum(axis=0)
        order = np.argsort(-col_sums, kind="stable")
        scores = np.cumsum(col_sums[order]) / (math.sqrt(m) * sqrt_ns) - lam[m, 1:]
        k = int(np.argmax(scores))
        obj = float(scores[k])
        if obj > best_obj:
            best_obj = obj
            best_sel = (
                tuple(int(r) for r in np.flatnonzero(members)),
                tuple(sorted(int(c) for c in order[: k + 1])),
            )
        elif obj == best_obj and best_sel is not None:
            cand = (
                tuple(int(r) for r in np.flatnonzero(members)),
                tuple(sorted(int(c) for c in order[: k + 1])),
            )
            if cand < best_sel:
                best_sel = cand

    sel = Selection(best_sel[0], best_sel[1])
    return ScanResult(sel, multiscale_objective(X, sel, params), (1 << M) - 1, 0)
