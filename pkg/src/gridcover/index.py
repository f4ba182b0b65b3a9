"""Multi-grid bucket index on a torus and the recall experiment.

Points live on the torus [0, L)^d with integer L >= 3 so wrapped unit cells
tile it exactly. An index is m unit grids, each shifted by a uniform offset in
[0, 1)^d; a point's bucket in grid i is floor(x - offset_i) mod L per
coordinate. A query retrieves the union of its m buckets, i.e. the union of
the m grid cells containing it, and the exact reference answer is a wrapped
max-metric range scan. Mean recall of the union against the exact answer over
random data, offsets, and queries estimates the at-least-one coverage
probability from `gridcover.analytic`.

`recall_experiment` draws fresh grid offsets for every query (per-query
substreams spawned from the experiment seed). A single offset draw would pin
the relative phases between grids for the whole run, making the observed mean
recall an uncontrolled function of that draw rather than an estimate of the
expectation the model predicts; per-query offsets make the query recalls iid
so the reported standard error is meaningful.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analytic import p_at_least_one

__all__ = [
    "MIN_TORUS_SIDE",
    "PointDataset",
    "MultiGridIndex",
    "RecallReport",
    "generate_dataset",
    "save_dataset",
    "load_dataset",
    "build",
    "query_candidates",
    "range_query_exact",
    "recall_experiment",
]

MIN_TORUS_SIDE = 3

_MAX_REDRAWS = 1000


@dataclass(frozen=True, eq=False)
class PointDataset:
    """n points on the torus [0, L)^d."""

    points: np.ndarray
    L: int

    def __post_init__(self) -> None:
        arr = np.array(self.points, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"points must be (n, d) with d >= 1, got {arr.shape}")
        if not isinstance(self.L, int) or self.L < MIN_TORUS_SIDE:
            raise ValueError(f"L must be an integer >= {MIN_TORUS_SIDE}, got {self.L!r}")
        if arr.size and (arr.min() < 0.0 or arr.max() >= self.L):
            raise ValueError("points must lie in [0, L)")
        arr.flags.writeable = False
        object.__setattr__(self, "points", arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def generate_dataset(n: int, d: int, L: int, seed: int) -> PointDataset:
    """n iid uniform points on the torus."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    rng = np.random.default_rng(seed)
    return PointDataset(rng.random((n, d)) * L, L)


def save_dataset(dataset: PointDataset, path: str) -> None:
    """Write points as CSV with header dim0,...,dim{d-1}, one point per row."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"dim{j}" for j in range(dataset.d)])
        for row in dataset.points:
            writer.writerow([repr(float(v)) for v in row])


def load_dataset(path: str, L: int) -> PointDataset:
    """Read a dataset written by `save_dataset`; L is not stored in the file."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        expected = [f"dim{j}" for j in range(len(header))]
        if header != expected:
            raise ValueError(f"{path}: bad header {header!r}, expected {expected!r}")
        rows = [[float(v) for v in row] for row in reader]
    points = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
    return PointDataset(points, L)


@dataclass(frozen=True, eq=False)
class MultiGridIndex:
    """m shifted unit grids over one dataset; one bucket dict per grid."""

    offsets: np.ndarray
    buckets: tuple[dict[tuple[int, ...], np.ndarray], ...]
    L: int
    size: int

    @property
    def m(self) -> int:
        return self.offsets.shape[0]

    @property
    def d(self) -> int:
        return self.offsets.shape[1]


def _cell_coords(points: np.ndarray, offsets: np.ndarray, L: int) -> np.ndarray:
    """Bucket coordinates of each point in each grid, shape (m, n, d)."""
    shifted = points[None, :, :] - offsets[:, None, :]
    return (np.floor(shifted).astype(np.int64)) % L


def build(
    dataset: PointDataset,
    m: int,
    seed: int | None = None,
    offsets: np.ndarray | None = None,
) -> MultiGridIndex:
    """Index the dataset under m independently shifted grids.

    Offsets are drawn from `seed` unless given explicitly (test hook; must be
    (m, d) in [0, 1)). Every point lands in exactly one bucket per grid.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if offsets is None:
        if seed is None:
            raise ValueError("either seed or offsets is required")
        offsets = np.random.default_rng(seed).random((m, dataset.d))
    else:
        offsets = np.array(offsets, dtype=np.float64, copy=True)
        if offsets.shape != (m, dataset.d):
            raise ValueError(
                f"offsets must have shape {(m, dataset.d)}, got {offsets.shape}"
            )
        if offsets.size and (offsets.min() < 0.0 or offsets.max() >= 1.0):
            raise ValueError("offsets must lie in [0, 1)")
    offsets.flags.writeable = False

    coords = _cell_coords(dataset.points, offsets, dataset.L)
    dims = (dataset.L,) * dataset.d
    grids = []
    for i in range(m):
        flat = np.ravel_multi_index(tuple(coords[i].T), dims)
        if flat.size == 0:
            grids.append({})
            continue
        order = np.argsort(flat, kind="stable")
        keys, starts = np.unique(flat[order], return_index=True)
        groups = np.split(order, starts[1:])
        key_coords = np.unravel_index(keys, dims)
        bucket = {
            tuple(int(axis[t]) for axis in key_coords): ids
            for t, ids in enumerate(groups)
        }
        grids.append(bucket)
    return MultiGridIndex(offsets, tuple(grids), dataset.L, dataset.n)


def _check_query(q: np.ndarray, d: int, L: int) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (d,):
        raise ValueError(f"query must have shape ({d},), got {q.shape}")
    if q.min() < 0.0 or q.max() >= L:
        raise ValueError("query must lie in [0, L)")
    return q


def query_candidates(index: MultiGridIndex, q: np.ndarray) -> np.ndarray:
    """Union of the m buckets containing q, as sorted unique point ids."""
    q = _check_query(q, index.d, index.L)
    pieces = []
    for i in range(index.m):
        key = tuple(
            (np.floor(q - index.offsets[i]).astype(np.int64) % index.L).tolist()
        )
        ids = index.buckets[i].get(key)
        if ids is not None:
            pieces.append(ids)
    if not pieces:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(pieces))


def range_query_exact(dataset: PointDataset, q: np.ndarray, s: float) -> np.ndarray:
    """Brute-force wrapped max-metric range scan: |x_j - q_j| < s/2 per axis.

    The strict inequality keeps the oracle symmetric (x in range of q iff q in
    range of x), which a one-sided half-open convention would break on exact
    boundaries; the difference has measure zero for continuous data.
    """
    q = _check_query(q, dataset.d, dataset.L)
    if not (0 < s <= dataset.L / 2):
        raise ValueError(f"s must satisfy 0 < s <= L/2, got {s!r}")
    if dataset.n == 0:
        return np.empty(0, dtype=np.int64)
    delta = (dataset.points - q + dataset.L / 2) % dataset.L - dataset.L / 2
    inside = (np.abs(delta) < s / 2).all(axis=1)
    return np.flatnonzero(inside).astype(np.int64)


def _query_recall(
    dataset: PointDataset, index: MultiGridIndex, q: np.ndarray
) -> tuple[float, int, int]:
    """(recall, candidate count, exact count) for one query at s = 1."""
    exact = range_query_exact(dataset, q, 1.0)
    if exact.size == 0:
        raise ValueError("query has an empty exact result")
    candidates = query_candidates(index, q)
    exact_mask = np.zeros(dataset.n, dtype=bool)
    exact_mask[exact] = True
    hits = int(exact_mask[candidates].sum())
    return hits / exact.size, int(candidates.size), int(exact.size)


@dataclass(frozen=True)
class RecallReport:
    """Summary of one recall experiment."""

    n: int
    d: int
    L: int
    m: int
    queries: int
    seed: int
    mean_recall: float
    stderr: float
    predicted: Fraction
    mean_candidate_fraction: float
    redraws: int


def recall_experiment(
    n: int, d: int, L: int, m: int, queries: int, seed: int
) -> RecallReport:
    """Measure mean union recall at s = 1 against the model prediction.

    One dataset; per query a fresh offset draw, a fresh index, and a fresh
    uniform query point. Queries whose exact range is empty are redrawn (new
    point, same offsets) and counted.
    """
    if not isinstance(queries, int) or queries < 1:
        raise ValueError(f"queries must be a positive integer, got {queries!r}")
    master = np.random.SeedSequence(seed)
    streams = master.spawn(queries + 1)
    data_seed = int(streams[0].generate_state(1, np.uint64)[0])
    dataset = generate_dataset(n, d, L, data_seed)

    recalls = np.empty(queries)
    candidate_fractions = np.empty(queries)
    redraws = 0
    for qi in range(queries):
        rng = np.random.default_rng(streams[qi + 1])
        offsets = rng.random((m, d))
        index = build(dataset, m, offsets=offsets)
        for attempt in range(_MAX_REDRAWS):
            q = rng.random(d) * L
            exact = range_query_exact(dataset, q, 1.0)
            if exact.size:
                break
            redraws += 1
        else:
            raise RuntimeError("could not draw a query with a non-empty exact result")
        recall, cand_count, _ = _query_recall(dataset, index, q)
        recalls[qi] = recall
        candidate_fractions[qi] = cand_count / dataset.n

    stderr = float(recalls.std(ddof=1) / math.sqrt(queries)) if queries > 1 else 0.0
    return RecallReport(
        n=n,
        d=d,
        L=L,
        m=m,
        queries=queries,
        seed=seed,
        mean_recall=float(recalls.mean()),
        stderr=stderr,
        predicted=p_at_least_one(m, d),
        mean_candidate_fraction=float(candidate_fractions.mean()),
        redraws=redraws,
    )
