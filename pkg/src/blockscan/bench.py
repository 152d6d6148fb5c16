"""Benchmark harness: error curves, timing runs, and the unimodality landscape.

Every experiment cell (one generated matrix, one method invocation) derives
its own RNG stream from (config seed, cell indices), and results are gathered
and ordered by cell index before writing, so a given config produces the same
rows at any parallelism level.  Wall-clock times are recorded in every row
for programmatic use; CSV output omits them by default (they are the one
nondeterministic field) unless `include_millis` is set, as the timing
experiment does.

Two scales ship for each experiment: `paper` (full dimensions, 30+
replications) and `desk` (dimensions divided by ~5, 10 replications, a
coarser signal grid) so a full sweep finishes in minutes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from time import perf_counter

import numpy as np

from .baselines import SpectralConfig, gmg_localize, spectral_localize
from .core import (
    PenaltyParams,
    Selection,
    critical_signal,
    localization_error,
    size_penalty_approx,
)
from .generate import GenerationSpec, derive_seed, generate, stream
from .search import AdaptiveConfig, GssConfig, _desc_order, _scan_fixed, adaptive_las, gss

__all__ = [
    "METHODS",
    "ResultRow",
    "ExperimentConfig",
    "UnimodalityResult",
    "error_curve_config",
    "timing_config",
    "unimodality_design",
    "run_error_curve",
    "run_timing",
    "unimodality_grid",
    "write_results_csv",
    "read_results_csv",
    "write_grid_csv",
    "RESULTS_HEADER",
]

METHODS = ("adaptive", "gss", "spectral", "gmg")

RESULTS_HEADER = "method,family,theta_mult,rep,err,millis"

# Weak-signal instances can need a few thousand power iterations (the top two
# singular values nearly tie); the generous cap costs nothing when converged.
_SPECTRAL = SpectralConfig(power_iter_max=100_000)

# (M, N, m*, n*) designs at full and ~1/5 scale.
PAPER_DESIGNS = {"balanced": (1000, 1200, 170, 140), "imbalanced": (4000, 500, 70, 250)}
DESK_DESIGNS = {"balanced": (200, 240, 34, 28), "imbalanced": (800, 100, 14, 50)}

PAPER_TIMING_DESIGN = (1000, 1000, 100, 100)
DESK_TIMING_DESIGN = (200, 200, 20, 20)

UNIMODALITY_DESIGNS = {
    "balanced": {"dims": (300, 360, 40, 60), "frame": (100, 120)},
    "imbalanced": {"dims": (500, 50, 10, 25), "frame": (100, 50)},
}


@dataclass(frozen=True)
class ResultRow:
    """One (method, replication) outcome of an experiment cell."""

    method: str
    family: str
    theta_mult: float
    rep: int
    err: float
    millis: float

    def __post_init__(self):
        if self.err < 0.0:
            raise ValueError("localization error is nonnegative by construction")
        if self.millis < 0.0:
            raise ValueError("wall time must be nonnegative")


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of signal strengths x replications x methods over one design."""

    families: tuple[str, ...] = ("gaussian",)
    M: int = 1000
    N: int = 1200
    m_star: int = 170
    n_star: int = 140
    theta_multipliers: tuple[float, ...] = tuple(round(1.0 + 0.1 * k, 10) for k in range(31))
    replications: int = 30
    methods: tuple[str, ...] = METHODS
    seed: int = 0
    delta: float = 0.0
    adaptive_init: tuple[int, int] = (25, 25)
    adaptive_restarts: int = 50
    gss_frame: tuple[int, int] = (500, 500)
    threads: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        mults = tuple(float(t) for t in self.theta_multipliers)
        if not mults or any(t < 0.0 for t in mults):
            raise ValueError("theta multipliers must be nonnegative")
        if any(b <= a for a, b in zip(mults, mults[1:])):
            raise ValueError("theta multipliers must be strictly increasing")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; expected a subset of {METHODS}")
        if not self.methods:
            raise ValueError("at least one method is required")

    @property
    def theta_unit(self) -> float:
        return critical_signal(self.M, self.N, self.m_star, self.n_star)


def error_curve_config(
    design: str = "balanced",
    scale: str = "desk",
    families: tuple[str, ...] = ("gaussian",),
    methods: tuple[str, ...] = METHODS,
    seed: int = 0,
    threads: int = 1,
    output_path: str | None = None,
    replications: int | None = None,
    theta_multipliers: tuple[float, ...] | None = None,
) -> ExperimentConfig:
    """Error-curve preset for a named design at paper or desk scale."""
    designs = {"paper": PAPER_DESIGNS, "desk": DESK_DESIGNS}.get(scale)
    if designs is None:
        raise ValueError(f"unknown scale {scale!r}; expected 'paper' or 'desk'")
    if design not in designs:
        raise ValueError(f"unknown design {design!r}; expected one of {sorted(designs)}")
    M, N, m_star, n_star = designs[design]
    if scale == "paper":
        mults = tuple(round(1.0 + 0.1 * k, 10) for k in range(31))
        reps = 30
        frame = (min(500, M), min(500, N))
    else:
        mults = tuple(round(1.0 + 0.5 * k, 10) for k in range(7))
        reps = 10
        frame = (max(2, M // 2), max(2, N // 2))
    return ExperimentConfig(
        families=tuple(families),
        M=M,
        N=N,
        m_star=m_star,
        n_star=n_star,
        theta_multipliers=theta_multipliers if theta_multipliers is not None else mults,
        replications=replications if replications is not None else reps,
        methods=tuple(methods),
        seed=seed,
        adaptive_init=(min(25, M), min(25, N)),
        adaptive_restarts=50,
        gss_frame=frame,
        threads=threads,
        output_path=output_path,
    )


def timing_config(
    scale: str = "paper",
    methods: tuple[str, ...] = METHODS,
    seed: int = 0,
    threads: int = 1,
    output_path: str | None = None,
    replications: int | None = None,
) -> ExperimentConfig:
    """Timing preset: one signal level at 2.5x the critical level, small start size."""
    if scale == "paper":
        M, N, m_star, n_star = PAPER_TIMING_DESIGN
        reps = 100
        frame = (min(500, M), min(500, N))
    elif scale == "desk":
        M, N, m_star, n_star = DESK_TIMING_DESIGN
        reps = 10
        frame = (max(2, M // 2), max(2, N // 2))
    else:
        raise ValueError(f"unknown scale {scale!r}; expected 'paper' or 'desk'")
    return ExperimentConfig(
        families=("gaussian",),
        M=M,
        N=N,
        m_star=m_star,
        n_star=n_star,
        theta_multipliers=(2.5,),
        replications=replications if replications is not None else reps,
        methods=tuple(methods),
        seed=seed,
        adaptive_init=(5, 5),
        adaptive_restarts=50,
        gss_frame=frame,
        threads=threads,
        output_path=output_path,
    )


def _localize(method: str, X: np.ndarray, cfg: ExperimentConfig, seed_key) -> Selection:
    if method == "adaptive":
        acfg = AdaptiveConfig(
            m0=cfg.adaptive_init[0],
            n0=cfg.adaptive_init[1],
            restarts=cfg.adaptive_restarts,
            penalty=PenaltyParams(cfg.delta),
        )
        return adaptive_las(X, acfg, seed=stream(cfg.seed, *seed_key)).selection
    if method == "gss":
        gcfg = GssConfig(
            m_bar=cfg.gss_frame[0], n_bar=cfg.gss_frame[1], penalty=PenaltyParams(cfg.delta)
        )
        return gss(X, gcfg, seed=stream(cfg.seed, *seed_key)).selection
    if method == "spectral":
        return spectral_localize(X, _SPECTRAL)
    if method == "gmg":
        return gmg_localize(X)
    raise ValueError(f"unknown method {method!r}")


def _run_cell(args) -> list[ResultRow]:
    """One (family, multiplier, replication) cell: generate once, run all methods."""
    cfg, fam_idx, mult_idx, rep_idx = args
    family = cfg.families[fam_idx]
    mult = cfg.theta_multipliers[mult_idx]
    spec = GenerationSpec(
        family=family,
        M=cfg.M,
        N=cfg.N,
        m_star=cfg.m_star,
        n_star=cfg.n_star,
        theta=mult * cfg.theta_unit,
        seed=derive_seed(cfg.seed, fam_idx, mult_idx, rep_idx, 0),
    )
    X, truth = generate(spec)
    rows = []
    for k, method in enumerate(cfg.methods):
        t0 = perf_counter()
        sel = _localize(method, X, cfg, (fam_idx, mult_idx, rep_idx, k + 1))
        millis = (perf_counter() - t0) * 1e3
        rows.append(ResultRow(method, family, mult, rep_idx, localization_error(sel, truth), millis))
    return rows


def _run_cells(cfg: ExperimentConfig, tasks: list[tuple]) -> list[ResultRow]:
    threads = cfg.threads if cfg.threads > 0 else None  # None -> executor picks cpu_count
    if cfg.threads == 1:
        chunks = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_cell, tasks, chunksize=1))
    return [row for chunk in chunks for row in chunk]


def run_error_curve(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the full (family x multiplier x replication x method) grid.

    Rows come back ordered by (family, multiplier, replication, method); the
    ordering and every err value are independent of `cfg.threads`.  If
    `cfg.output_path` is set the rows are also written there as CSV (without
    the nondeterministic millis field) next to a JSON sidecar recording the
    config.
    """
    tasks = [
        (cfg, fi, gi, ri)
        for fi in range(len(cfg.families))
        for gi in range(len(cfg.theta_multipliers))
        for ri in range(cfg.replications)
    ]
    rows = _run_cells(cfg, tasks)
    if cfg.output_path is not None:
        write_results_csv(rows, cfg.output_path, include_millis=False)
        _write_sidecar(cfg.output_path, cfg)
    return rows


def run_timing(cfg: ExperimentConfig | None = None, scale: str = "paper") -> list[ResultRow]:
    """Run the timing experiment; every CSV row keeps its measured wall time."""
    cfg = cfg if cfg is not None else timing_config(scale=scale)
    out, cfg = cfg.output_path, replace(cfg, output_path=None)
    rows = run_error_curve(cfg)
    if out is not None:
        write_results_csv(rows, out, include_millis=True)
        _write_sidecar(out, replace(cfg, output_path=out))
    return rows


@dataclass(frozen=True)
class UnimodalityResult:
    """Size-score landscape over [1, m_bar] x [1, n_bar].

    raw[m-1, n-1] is the penalized scan score at size (m, n) using the
    closed-form penalty approximation; `display` is the raw grid shifted to
    nonnegative and raised to the 4th power (the level-plot transform).
    """

    raw: np.ndarray
    display: np.ndarray
    truth: Selection
    spec: GenerationSpec
    m_bar: int
    n_bar: int
    las_restarts: int
    seed: int

    @property
    def argmax_size(self) -> tuple[int, int]:
        m_idx, n_idx = np.unravel_index(int(np.argmax(self.raw)), self.raw.shape)
        return int(m_idx) + 1, int(n_idx) + 1


def unimodality_design(name: str = "balanced", theta_mult: float = 2.0) -> tuple[GenerationSpec, int, int]:
    """Default landscape design: (generation spec template, m_bar, n_bar)."""
    if name not in UNIMODALITY_DESIGNS:
        raise ValueError(f"unknown design {name!r}; expected one of {sorted(UNIMODALITY_DESIGNS)}")
    entry = UNIMODALITY_DESIGNS[name]
    M, N, m_star, n_star = entry["dims"]
    theta = theta_mult * critical_signal(M, N, m_star, n_star)
    spec = GenerationSpec(family="gaussian", M=M, N=N, m_star=m_star, n_star=n_star, theta=theta, seed=0)
    return spec, entry["frame"][0], entry["frame"][1]


# Worker state for the grid pool; populated by the initializer (fork or spawn).
_GRID: dict = {}


def _grid_init(X, seed, las_restarts):
    _GRID["X"] = X
    _GRID["Xt"] = np.ascontiguousarray(X.T)
    _GRID["det_order"] = _desc_order(X.sum(axis=1))
    _GRID["seed"] = seed
    _GRID["restarts"] = las_restarts


def _grid_row(args) -> np.ndarray:
    """Scores for all (m, n), n = 1..n_bar, at one fixed m."""
    m, n_bar = args
    X, Xt = _GRID["X"], _GRID["Xt"]
    M, N = X.shape
    out = np.empty(n_bar)
    for n in range(1, n_bar + 1):
        rng = stream(_GRID["seed"], 1, m, n)
        value, _, _, _ = _scan_fixed(X, Xt, _GRID["det_order"], m, n, _GRID["restarts"], rng, 100)
        out[n - 1] = value / math.sqrt(m * n) - size_penalty_approx(M, N, m, n)
    return out


def unimodality_grid(
    design: GenerationSpec,
    m_bar: int,
    n_bar: int,
    las_restarts: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> UnimodalityResult:
    """Estimate the size-score landscape of one generated instance.

    The matrix comes from `design` re-seeded from `seed`; each grid cell
    (m, n) runs `las_restarts` random-start LAS scans (deterministic start if
    1) on its own (seed, m, n) stream and keeps the best sum.  Cell values
    are therefore independent of `threads` and of evaluation order.
    """
    if not (1 <= m_bar <= design.M and 1 <= n_bar <= design.N):
        raise ValueError(f"frame ({m_bar}, {n_bar}) out of range for ({design.M}, {design.N})")
    spec = replace(design, seed=derive_seed(seed, 0))
    X, truth = generate(spec)
    tasks = [(m, n_bar) for m in range(1, m_bar + 1)]
    if threads == 1:
        _grid_init(X, seed, las_restarts)
        rows = [_grid_row(t) for t in tasks]
    else:
        workers = threads if threads > 0 else None
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_grid_init, initargs=(X, seed, las_restarts)
        ) as pool:
            rows = list(pool.map(_grid_row, tasks, chunksize=4))
    raw = np.vstack(rows)
    display = (raw - raw.min()) ** 4
    return UnimodalityResult(raw, display, truth, spec, m_bar, n_bar, las_restarts, seed)


def write_results_csv(rows: list[ResultRow], path, include_millis: bool = True) -> None:
    """Fixed-schema results CSV; the millis field is left empty when excluded."""
    with open(path, "w", newline="") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for r in rows:
            ms = f"{r.millis:.3f}" if include_millis else ""
            fh.write(f"{r.method},{r.family},{r.theta_mult:g},{r.rep},{r.err:.17g},{ms}\n")


def read_results_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise ValueError(f"unexpected results header {header!r}")
        for line in fh:
            method, family, mult, rep, err, ms = line.rstrip("\n").split(",")
            rows.append(
                ResultRow(method, family, float(mult), int(rep), float(err), float(ms) if ms else 0.0)
            )
    return rows


def write_grid_csv(grid: np.ndarray, path) -> None:
    np.savetxt(path, grid, fmt="%.17g", delimiter=",")


def _write_sidecar(out_path, cfg: ExperimentConfig) -> None:
    payload = asdict(cfg)
    payload["theta_unit"] = cfg.theta_unit
    sidecar = Path(out_path).with_suffix(".json")
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
