"""Synthetic planted-block data under three mean-0 variance-1 noise families.

Each family is a one-parameter exponential tilt of a standardized base
measure: the background is drawn from the base measure, the planted block
from the tilted density exp(theta*x - log mgf(theta)) relative to it.

* gaussian:   base N(0,1); tilt by theta gives N(theta, 1).
* poisson:    base Y - 1 with Y ~ Poisson(1); tilt gives Y - 1, Y ~ Poisson(e^theta).
* rademacher: base +/-1 equiprobable; tilt gives +1 with prob e^theta/(e^theta+e^-theta).

Randomness comes from numpy's PCG64 Generator seeded through SeedSequence
spawn keys, so every (seed, task-index) pair owns an independent stream and
results are bit-identical regardless of execution order or thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import Selection, as_matrix

__all__ = [
    "FAMILIES",
    "GenerationSpec",
    "stream",
    "derive_seed",
    "generate",
    "background_sample",
    "anomaly_sample",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_truth_json",
    "read_truth_json",
]

FAMILIES = ("gaussian", "poisson", "rademacher")


@dataclass(frozen=True)
class GenerationSpec:
    """Recipe for one planted-block matrix.

    The anomaly occupies the leading m_star x n_star block (rows 0..m_star-1,
    columns 0..n_star-1); by permutation invariance of every method in this
    library, planting at the corner loses no generality.  `theta` is the
    natural parameter of the tilted family, >= 0.
    """

    family: str
    M: int
    N: int
    m_star: int
    n_star: int
    theta: float
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.M < 1 or self.N < 1:
            raise ValueError(f"dimensions must be positive, got ({self.M}, {self.N})")
        if not (1 <= self.m_star <= self.M and 1 <= self.n_star <= self.N):
            raise ValueError(
                f"planted size ({self.m_star}, {self.n_star}) out of range for ({self.M}, {self.N})"
            )
        if not (self.theta >= 0.0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be finite and >= 0, got {self.theta}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    @property
    def truth(self) -> Selection:
        return Selection(tuple(range(self.m_star)), tuple(range(self.n_star)))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream for (seed, key), stable across processes."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit child seed derived from (seed, key); feed it to GenerationSpec."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def background_sample(family: str, size, rng: np.random.Generator) -> np.ndarray:
    """Draw from the family's mean-0 variance-1 base measure."""
    if family == "gaussian":
        return rng.standard_normal(size)
    if family == "poisson":
        return rng.poisson(1.0, size).astype(np.float64) - 1.0
    if family == "rademacher":
        return rng.integers(0, 2, size).astype(np.float64) * 2.0 - 1.0
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def anomaly_sample(family: str, theta: float, size, rng: np.random.Generator) -> np.ndarray:
    """Draw from the theta-tilted density of the family's base measure."""
    if theta < 0.0 or not math.isfinite(theta):
        raise ValueError(f"theta must be finite and >= 0, got {theta}")
    if family == "gaussian":
        return rng.standard_normal(size) + theta
    if family == "poisson":
        return rng.poisson(math.exp(theta), size).astype(np.float64) - 1.0
    if family == "rademacher":
        p_plus = 1.0 / (1.0 + math.exp(-2.0 * theta))
        return np.where(rng.random(size) < p_plus, 1.0, -1.0)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def generate(spec: GenerationSpec) -> tuple[np.ndarray, Selection]:
    """Sample one matrix under `spec`; returns (matrix, planted selection).

    The full background is drawn first and the leading block then overwritten
    with tilted draws, all from a single stream, so identical specs give
    bit-identical matrices.
    """
    rng = stream(spec.seed)
    X = background_sample(spec.family, (spec.M, spec.N), rng)
    X[: spec.m_star, : spec.n_star] = anomaly_sample(
        spec.family, spec.theta, (spec.m_star, spec.n_star), rng
    )
    return X, spec.truth


def write_matrix_csv(X: np.ndarray, path) -> None:
    """Plain numeric CSV, one matrix row per line, no header; %.17g round-trips."""
    np.savetxt(path, as_matrix(X), fmt="%.17g", delimiter=",")


def read_matrix_csv(path) -> np.ndarray:
    return as_matrix(np.loadtxt(path, delimiter=",", ndmin=2))


def write_truth_json(path, spec: GenerationSpec, truth: Selection, extra: dict | None = None) -> None:
    """Sidecar metadata: the generation spec plus the planted selection (1-based)."""
    payload = {
        "rows": [i + 1 for i in truth.rows],
        "cols": [j + 1 for j in truth.cols],
        "spec": asdict(spec),
    }
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_truth_json(path) -> tuple[Selection, dict]:
    """Load a truth sidecar; returns (selection 0-based, full payload)."""
    payload = json.loads(Path(path).read_text())
    sel = Selection(
        tuple(int(i) - 1 for i in payload["rows"]),
        tuple(int(j) - 1 for j in payload["cols"]),
    )
    return sel, payload
