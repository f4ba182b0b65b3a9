"""Monte Carlo estimation of coverage probabilities over random cell sets.

Two estimators:

* `estimate`: draws cell sets and averages their exact coverage volumes
  (`gridcover.geometry.coverage_volumes`), so the only noise is over cell
  placements. Limited to the exact-decomposition range m <= 8, d <= 8.
* `estimate_pointwise`: two-stage sampling, uniform query points inside each
  sampled cell set, for specs beyond the exact range. The reported standard
  error is the sample standard error of the per-cell-set covered fractions,
  which captures both stages of variance (between cell sets dominates).

Determinism: for a given (spec, samples, seed, method) the result is
bit-identical across runs and across internal chunk sizes. Offsets are
consumed from a single seeded PCG64 stream in row-major order, so the draws
belonging to cell set i are a fixed function of (seed, i) regardless of how
the work is chunked; `estimate_pointwise` splits the master seed into one
substream for cell sets and one for query points for the same reason.

A request with m = 1 and ell > 1 denotes the ell-fold overlap of independent
cells and is normalized to (m=ell, threshold=ell); the returned Estimate
records the original spec in `normalized_from`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analytic import p_at_least_ell
from .geometry import (
    MAX_EXACT_CELLS,
    MAX_EXACT_DIMS,
    CoverageSpec,
    DecompositionLimitError,
    coverage_volumes,
)

__all__ = [
    "MIN_SAMPLES",
    "Estimate",
    "SweepRow",
    "child_seed",
    "estimate",
    "estimate_pointwise",
    "normalize_spec",
    "sweep",
]

MIN_SAMPLES = 100

_CHUNK = 32768


@dataclass(frozen=True)
class Estimate:
    """A simulated coverage probability with its standard error."""

    mean: float
    stderr: float
    samples: int
    seed: int
    spec: CoverageSpec
    method: str
    normalized_from: CoverageSpec | None = None
    points_per_cellset: int | None = None


def normalize_spec(spec: CoverageSpec) -> tuple[CoverageSpec, CoverageSpec | None]:
    """Map an (m=1, ell>1) overlap request to (m=ell, threshold=ell).

    Returns (spec to run, original spec or None when nothing changed).
    """
    if spec.m == 1 and spec.ell > 1:
        return CoverageSpec(spec.ell, spec.ell, spec.d, spec.b, spec.s), spec
    return spec, None


def _require_samples(name: str, value: int) -> None:
    if not isinstance(value, int) or value < MIN_SAMPLES:
        raise ValueError(f"{name} must be an integer >= {MIN_SAMPLES}, got {value!r}")


def estimate(
    spec: CoverageSpec, samples: int, seed: int, chunk_size: int = _CHUNK
) -> Estimate:
    """Mean exact coverage volume over `samples` independent cell sets."""
    _require_samples("samples", samples)
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    spec, normalized_from = normalize_spec(spec)
    if spec.m > MAX_EXACT_CELLS or spec.d > MAX_EXACT_DIMS:
        raise DecompositionLimitError(
            f"m={spec.m}, d={spec.d} exceeds the exact range "
            f"(m <= {MAX_EXACT_CELLS}, d <= {MAX_EXACT_DIMS}); "
            "use estimate_pointwise"
        )

    rng = np.random.default_rng(seed)
    volumes = np.empty(samples)
    done = 0
    while done < samples:
        k = min(chunk_size, samples - done)
        offsets = rng.random((k, spec.m, spec.d))
        volumes[done : done + k] = coverage_volumes(offsets, spec.ell)
        done += k

    mean = float(volumes.mean())
    stderr = float(volumes.std(ddof=1) / math.sqrt(samples))
    return Estimate(mean, stderr, samples, seed, spec, "exact-volume", normalized_from)


def estimate_pointwise(
    spec: CoverageSpec,
    cell_samples: int,
    points_per_cellset: int,
    seed: int,
) -> Estimate:
    """Two-stage point-sampling estimator, valid for any spec size."""
    _require_samples("cell_samples", cell_samples)
    _require_samples("points_per_cellset", points_per_cellset)
    spec, normalized_from = normalize_spec(spec)

    cells_ss, points_ss = np.random.SeedSequence(seed).spawn(2)
    rng_cells = np.random.default_rng(cells_ss)
    rng_points = np.random.default_rng(points_ss)

    # Chunk so the point block stays around 4M floats.
    chunk = max(1, 4_000_000 // (points_per_cellset * spec.d))
    fractions = np.empty(cell_samples)
    done = 0
    while done < cell_samples:
        k = min(chunk, cell_samples - done)
        offsets = rng_cells.random((k, spec.m, spec.d))
        points = rng_points.random((k, points_per_cellset, spec.d)) - 0.5
        counts = np.zeros((k, points_per_cellset), dtype=np.int32)
        for i in range(spec.m):
            inside = np.ones((k, points_per_cellset), dtype=bool)
            for j in range(spec.d):
                upper = offsets[:, i, j][:, None]
                coord = points[:, :, j]
                inside &= (coord >= upper - 1.0) & (coord < upper)
            counts += inside
        fractions[done : done + k] = (counts >= spec.ell).mean(axis=1)
        done += k

    mean = float(fractions.mean())
    stderr = float(fractions.std(ddof=1) / math.sqrt(cell_samples))
    return Estimate(
        mean,
        stderr,
        cell_samples,
        seed,
        spec,
        "point-sample",
        normalized_from,
        points_per_cellset,
    )


@dataclass(frozen=True)
class SweepRow:
    """One sweep result: the estimate, its exact counterpart, and a z-score."""

    spec: CoverageSpec
    estimate: Estimate
    analytic: Fraction
    z: float | None


def child_seed(seed: int, index: int) -> int:
    """Derive an independent, reproducible seed for the index-th subtask."""
    state = np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)
    return int(state[0])


def sweep(specs: list[CoverageSpec], samples: int, seed: int) -> list[SweepRow]:
    """Estimate every spec with an independent derived seed and score it.

    The analytic value is looked up for the spec the simulator actually ran
    (after (m=1, ell>1) normalization) so z compares like with like. z is None
    only in the degenerate stderr == 0, mean != analytic case, which a correct
    build never produces.
    """
    rows = []
    for index, spec in enumerate(specs):
        est = estimate(spec, samples, child_seed(seed, index))
        run = est.spec
        analytic = p_at_least_ell(run.m, run.ell, run.d)
        if est.stderr > 0.0:
            z: float | None = (est.mean - float(analytic)) / est.stderr
        elif est.mean == float(analytic):
            z = 0.0
        else:
            z = None
        rows.append(SweepRow(spec, est, analytic, z))
    return rows
