"""Geometry of randomly offset unit grid cells intersecting a centered unit query cube.

Model: all lengths are measured in units of the (common) cell and query side.
The query is the half-open cube [-1/2, 1/2)^d. A randomly placed grid cell that
meets the query near the origin is parameterized per dimension by a single
offset u in [0, 1) and spans [u - 1, u). A cell set is m such cells with
independent offsets, and the quantity of interest is the volume of the query
covered by at least `ell` of the m cells.

Exact volumes are computed by a slab decomposition: per dimension the 2m + 2
interval endpoints (clipped interval bounds plus the query faces) cut the axis
into elementary slabs, each slab carrying a bitmask of the cells that cover it.
Elementary boxes are never materialized as a (2m+1)^d array; instead volumes
are aggregated lazily per coverage bitmask while folding in one dimension at a
time. The decomposition is limited to m <= MAX_EXACT_CELLS and
d <= MAX_EXACT_DIMS; beyond that callers should fall back to point sampling
(see `gridcover.simulate.estimate_pointwise`).

Everything here is a pure function of immutable values. Random sampling
consumes an explicit numpy Generator; callers that parallelize are expected to
split seeds and use one stream per task.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_EXACT_CELLS",
    "MAX_EXACT_DIMS",
    "DecompositionLimitError",
    "CoverageSpec",
    "CellSet",
    "ClippedIntervalSet",
    "sample_cell_set",
    "clip_to_query",
    "coverage_volume",
    "coverage_volumes",
]

MAX_EXACT_CELLS = 8
MAX_EXACT_DIMS = 8


class DecompositionLimitError(ValueError):
    """Raised when an exact slab decomposition would exceed the supported size."""


def _check_decomposition_limits(m: int, d: int) -> None:
    if m > MAX_EXACT_CELLS or d > MAX_EXACT_DIMS:
        raise DecompositionLimitError(
            f"exact decomposition supports m <= {MAX_EXACT_CELLS} and "
            f"d <= {MAX_EXACT_DIMS}, got m={m}, d={d}; use point sampling instead"
        )


@dataclass(frozen=True)
class CoverageSpec:
    """Problem statement: m cells, coverage threshold ell, dimension d.

    b and s are the cell and query side lengths. Only b == s geometry is
    supported; the unit-length model used everywhere else is the rescaling of
    any such configuration, so b and s are carried for interface completeness
    and validated, never consumed downstream.
    """

    m: int
    ell: int
    d: int
    b: float = 1.0
    s: float = 1.0

    def __post_init__(self) -> None:
        for name in ("m", "ell", "d"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not (self.b > 0 and self.s > 0):
            raise ValueError(f"b and s must be positive, got b={self.b}, s={self.s}")
        if self.b != self.s:
            raise ValueError(
                f"only b == s geometry is supported, got b={self.b}, s={self.s}"
            )


def _locked_array(values: np.ndarray | list, shape_hint: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise ValueError(f"{shape_hint} must be a 2-d array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class CellSet:
    """One realization of m cell offsets in d dimensions.

    offsets[i, j] is the upper cell boundary of cell i along dimension j; the
    cell spans [offsets[i, j] - 1, offsets[i, j]). Offsets live in [0, 1), so
    each cell straddles the origin up to the half-open boundary case u = 0.
    """

    offsets: np.ndarray = field()

    def __post_init__(self) -> None:
        arr = _locked_array(self.offsets, "offsets")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"offsets must be (m, d) with m, d >= 1, got {arr.shape}")
        if np.any(arr < 0.0) or np.any(arr >= 1.0):
            raise ValueError("offsets must lie in [0, 1)")
        object.__setattr__(self, "offsets", arr)

    @property
    def m(self) -> int:
        return self.offsets.shape[0]

    @property
    def d(self) -> int:
        return self.offsets.shape[1]


@dataclass(frozen=True, eq=False)
class ClippedIntervalSet:
    """Per-dimension intersections of each cell with the query cube.

    lowers[i, j] = max(u_ij - 1, -1/2) and uppers[i, j] = min(u_ij, 1/2); the
    intervals are half-open [lower, upper) and always non-empty because every
    cell straddles the query center.
    """

    lowers: np.ndarray
    uppers: np.ndarray

    def __post_init__(self) -> None:
        lowers = _locked_array(self.lowers, "lowers")
        uppers = _locked_array(self.uppers, "uppers")
        if lowers.shape != uppers.shape:
            raise ValueError("lowers and uppers must have the same shape")
        if np.any(uppers <= lowers):
            raise ValueError("each clipped interval must be non-empty")
        object.__setattr__(self, "lowers", lowers)
        object.__setattr__(self, "uppers", uppers)

    @property
    def m(self) -> int:
        return self.lowers.shape[0]

    @property
    def d(self) -> int:
        return self.lowers.shape[1]

    def intervals(self, dim: int) -> list[tuple[float, float]]:
        """Clipped [lower, upper) pairs along one dimension, one per cell."""
        return [
            (float(lo), float(hi))
            for lo, hi in zip(self.lowers[:, dim], self.uppers[:, dim])
        ]

    def lengths(self) -> np.ndarray:
        return self.uppers - self.lowers


def sample_cell_set(rng: np.random.Generator, spec: CoverageSpec) -> CellSet:
    """Draw one CellSet realization from `rng` for the given spec.

    Consumes exactly m * d uniforms in row-major order, so advancing the same
    seeded stream twice yields two independent realizations and identical
    seeds yield identical sequences.
    """
    return CellSet(rng.random((spec.m, spec.d)))


def clip_to_query(cells: CellSet) -> ClippedIntervalSet:
    """Intersect every cell with the query cube [-1/2, 1/2)^d."""
    return ClippedIntervalSet(
        lowers=np.maximum(cells.offsets - 1.0, -0.5),
        uppers=np.minimum(cells.offsets, 0.5),
    )


def coverage_volume(cells: CellSet, ell: int) -> float:
    """Exact volume of the query covered by at least `ell` of the cells.

    Reference scalar implementation of the slab decomposition; the vectorized
    `coverage_volumes` computes the same function over a batch and the two are
    cross-checked in tests.
    """
    if not isinstance(ell, int) or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    m, d = cells.m, cells.d
    if ell > m:
        return 0.0
    _check_decomposition_limits(m, d)
    clipped = clip_to_query(cells)

    # acc maps a coverage bitmask to the total volume of elementary boxes,
    # over the dimensions folded so far, whose covering cell set is exactly
    # that mask. Before any dimension every cell is still a candidate.
    acc: dict[int, float] = {(1 << m) - 1: 1.0}
    for j in range(d):
        lowers = clipped.lowers[:, j]
        uppers = clipped.uppers[:, j]
        edges = sorted({-0.5, 0.5, *lowers.tolist(), *uppers.tolist()})
        nxt: dict[int, float] = defaultdict(float)
        for lo, hi in zip(edges, edges[1:]):
            mask = 0
            for i in range(m):
                if lowers[i] <= lo and hi <= uppers[i]:
                    mask |= 1 << i
            width = hi - lo
            for known, vol in acc.items():
                nxt[known & mask] += vol * width
        acc = dict(nxt)
    return float(sum(vol for mask, vol in acc.items() if mask.bit_count() >= ell))


def _and_project(values: np.ndarray, masks: np.ndarray, m: int) -> np.ndarray:
    """Redistribute per-mask volumes under mask -> mask & masks[row].

    values has shape (n, 2**m); masks has shape (n,). Returns a new array.
    Processing one bit at a time keeps the operation dense and vectorized:
    wherever a row's mask lacks bit b, volume sitting at mask entries with
    bit b set merges into the entry with bit b cleared.
    """
    n = values.shape[0]
    out = values
    for b in range(m):
        lacks = (((masks >> b) & 1) == 0)[:, None, None]
        split = out.reshape(n, -1, 2, 1 << b)
        lowered = np.empty_like(split)
        lowered[:, :, 0, :] = np.where(lacks, split[:, :, 0, :] + split[:, :, 1, :],
                                       split[:, :, 0, :])
        lowered[:, :, 1, :] = np.where(lacks, 0.0, split[:, :, 1, :])
        out = lowered.reshape(n, -1)
    return out


def coverage_volumes(offsets: np.ndarray, ell: int) -> np.ndarray:
    """Exact at-least-`ell` coverage volumes for a stack of cell sets.

    offsets has shape (n, m, d), entries in [0, 1). Vectorized counterpart of
    `coverage_volume`; same slab decomposition, same limits.
    """
    if not isinstance(ell, int) or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    offsets = np.asarray(offsets, dtype=np.float64)
    if offsets.ndim != 3:
        raise ValueError(f"offsets must have shape (n, m, d), got {offsets.shape}")
    n, m, d = offsets.shape
    if n == 0:
        return np.zeros(0)
    if np.any(offsets < 0.0) or np.any(offsets >= 1.0):
        raise ValueError("offsets must lie in [0, 1)")
    if ell > m:
        return np.zeros(n)
    _check_decomposition_limits(m, d)

    lowers = np.maximum(offsets - 1.0, -0.5)  # (n, m, d)
    uppers = np.minimum(offsets, 0.5)
    edges = np.concatenate(
        [
            np.full((n, 1, d), -0.5),
            lowers,
            uppers,
            np.full((n, 1, d), 0.5),
        ],
        axis=1,
    )
    edges.sort(axis=1)
    slab_lo = edges[:, :-1, :]  # (n, S, d) with S = 2m + 1
    slab_hi = edges[:, 1:, :]
    widths = slab_hi - slab_lo

    covers = (lowers[:, None, :, :] <= slab_lo[:, :, None, :]) & (
        slab_hi[:, :, None, :] <= uppers[:, None, :, :]
    )  # (n, S, m, d)
    bit_weights = (1 << np.arange(m, dtype=np.int64))[None, None, :, None]
    masks = (covers.astype(np.int64) * bit_weights).sum(axis=2)  # (n, S, d)

    volumes = np.zeros((n, 1 << m))
    volumes[:, (1 << m) - 1] = 1.0
    n_slabs = widths.shape[1]
    for j in range(d):
        nxt = np.zeros_like(volumes)
        for s in range(n_slabs):
            w = widths[:, s, j]
            if not w.any():
                continue
            nxt += w[:, None] * _and_project(volumes, masks[:, s, j], m)
        volumes = nxt

    keep = np.array(
        [1.0 if mask.bit_count() >= ell else 0.0 for mask in range(1 << m)]
    )
    return volumes @ keep
