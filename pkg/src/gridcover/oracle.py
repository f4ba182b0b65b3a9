"""Formula-free numeric evaluation of the coverage integrals.

A closed catalog of integrands mirrors each exact value produced by
`gridcover.analytic`, written directly as pointwise functions of the raw
integration variables (no closed forms smuggled in). Two integrators are
provided:

* `integrate_tensor`: tensor-product midpoint rule, arity <= 4, with a
  deliberately conservative guaranteed error bound C * arity / points_per_axis
  (C = 2 covers the worst per-coordinate Lipschitz constant in the catalog).
* `integrate_mc`: plain Monte Carlo with a 4-standard-error tolerance,
  deterministic for a given seed, any catalog arity.

The catalog is intentionally an enumerated set: entries are built only through
`catalog_entry`, so a typo'd name fails loudly instead of integrating the
wrong thing. Catalog arity is capped at 12.

Monte Carlo draws are consumed in fixed-size blocks from a single seeded
stream with a fixed reduction order, so results do not depend on how the work
is scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import fsum
from typing import Callable

import numpy as np

from .analytic import (
    combined_integral,
    max_offset_integral,
    p_at_least_one,
    p_one_of_one_overlap,
    span_integral,
)

__all__ = [
    "MAX_TENSOR_ARITY",
    "MAX_TENSOR_GRID",
    "MIN_MC_SAMPLES",
    "MAX_CATALOG_ARITY",
    "BoxDomain",
    "CatalogEntry",
    "OracleResult",
    "catalog_entry",
    "catalog_names",
    "default_catalog",
    "integrate_tensor",
    "integrate_mc",
]

MAX_TENSOR_ARITY = 4
MAX_TENSOR_GRID = 10**8
MIN_MC_SAMPLES = 10**4
MAX_CATALOG_ARITY = 12

_MC_BLOCK = 1 << 17

_ROLE_BOUNDS = {
    "nonneg": (0.0, 0.5),
    "nonpos": (-0.5, 0.0),
    "full": (-0.5, 0.5),
}


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned integration box, one symbolic role per variable."""

    roles: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.roles:
            raise ValueError("domain needs at least one variable")
        for role in self.roles:
            if role not in _ROLE_BOUNDS:
                raise ValueError(f"unknown variable role {role!r}")

    @property
    def arity(self) -> int:
        return len(self.roles)

    @property
    def lowers(self) -> np.ndarray:
        return np.array([_ROLE_BOUNDS[r][0] for r in self.roles])

    @property
    def uppers(self) -> np.ndarray:
        return np.array([_ROLE_BOUNDS[r][1] for r in self.roles])

    @property
    def volume(self) -> float:
        return float(np.prod(self.uppers - self.lowers))


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A named integrand with its domain and exact reference value."""

    name: str
    params: dict[str, int]
    domain: BoxDomain
    exact: Fraction
    fn: Callable[[np.ndarray], np.ndarray]

    @property
    def arity(self) -> int:
        return self.domain.arity

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})" if inner else self.name


def _offset_product(d: int) -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        return np.prod(x + 0.5, axis=1)

    return CatalogEntry(
        "offset-product", {"d": d}, BoxDomain(("nonneg",) * d), Fraction(3, 8) ** d, fn
    )


def _max_offset_plus_half(d: int) -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        return x.max(axis=1) + 0.5

    return CatalogEntry(
        "max-offset-plus-half",
        {"d": d},
        BoxDomain(("nonneg",) * d),
        max_offset_integral(d),
        fn,
    )


def _span_product(d: int) -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        return np.prod(x[:, :d] - x[:, d:], axis=1)

    return CatalogEntry(
        "span-product",
        {"d": d},
        BoxDomain(("nonneg",) * d + ("nonpos",) * d),
        span_integral(d),
        fn,
    )


def _max_offset_span_combined(d: int, m: int) -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        envelope = x[:, :d].max(axis=1) + 0.5
        spans = np.prod(x[:, d : d + m] - x[:, d + m :], axis=1)
        return envelope * spans

    return CatalogEntry(
        "max-offset-span-combined",
        {"d": d, "m": m},
        BoxDomain(("nonneg",) * d + ("nonneg",) * m + ("nonpos",) * m),
        combined_integral(d, m),
        fn,
    )


def _pair_overlap_1d() -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        a, b = x[:, 0], x[:, 1]
        mixed = (a < 0) ^ (b < 0)
        return np.where(
            mixed, 1.0 - np.abs(a - b), 1.0 - np.maximum(np.abs(a), np.abs(b))
        )

    return CatalogEntry(
        "pair-overlap-1d",
        {},
        BoxDomain(("full", "full")),
        p_one_of_one_overlap(2),
        fn,
    )


def _triple_overlap_1d() -> CatalogEntry:
    # Explicit walk over the 8 sign octants: in each octant the covered
    # length is 1 - max(nonnegative offsets) + min(negative offsets), with an
    # absent group contributing nothing.
    def fn(x: np.ndarray) -> np.ndarray:
        neg = x < 0
        octant = (neg * np.array([1, 2, 4])).sum(axis=1)
        out = np.empty(x.shape[0])
        for code in range(8):
            sel = octant == code
            if not sel.any():
                continue
            sub = x[sel]
            pos_cols = [j for j in range(3) if not (code >> j) & 1]
            neg_cols = [j for j in range(3) if (code >> j) & 1]
            value = np.ones(sub.shape[0])
            if pos_cols:
                value = value - sub[:, pos_cols].max(axis=1)
            if neg_cols:
                value = value + sub[:, neg_cols].min(axis=1)
            out[sel] = value
        return out

    return CatalogEntry(
        "triple-overlap-1d",
        {},
        BoxDomain(("full",) * 3),
        p_one_of_one_overlap(3),
        fn,
    )


def _overlap_1d(ell: int) -> CatalogEntry:
    # Compact form of the same piecewise function for any cell count: clip
    # the extreme offsets against the query faces.
    def fn(x: np.ndarray) -> np.ndarray:
        return 1.0 - np.maximum(x.max(axis=1), 0.0) + np.minimum(x.min(axis=1), 0.0)

    return CatalogEntry(
        "overlap-1d",
        {"ell": ell},
        BoxDomain(("full",) * ell),
        p_one_of_one_overlap(ell),
        fn,
    )


def _multi_grid_union(m: int, d: int) -> CatalogEntry:
    # Independent route to the union coverage: for a fixed query point at
    # displacement z from the query center, a random origin-straddling cell
    # covers it with probability prod_j (1 - |z_j|), so at least one of m
    # independent cells covers it with probability 1 - (1 - prod)^m.
    def fn(x: np.ndarray) -> np.ndarray:
        per_cell = np.prod(1.0 - np.abs(x), axis=1)
        return 1.0 - (1.0 - per_cell) ** m

    return CatalogEntry(
        "multi-grid-union",
        {"m": m, "d": d},
        BoxDomain(("full",) * d),
        p_at_least_one(m, d),
        fn,
    )


def _unit_constant(arity: int) -> CatalogEntry:
    def fn(x: np.ndarray) -> np.ndarray:
        return np.ones(x.shape[0])

    return CatalogEntry(
        "unit-constant", {"arity": arity}, BoxDomain(("full",) * arity), Fraction(1), fn
    )


_BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "offset-product": _offset_product,
    "max-offset-plus-half": _max_offset_plus_half,
    "span-product": _span_product,
    "max-offset-span-combined": _max_offset_span_combined,
    "pair-overlap-1d": _pair_overlap_1d,
    "triple-overlap-1d": _triple_overlap_1d,
    "overlap-1d": _overlap_1d,
    "multi-grid-union": _multi_grid_union,
    "unit-constant": _unit_constant,
}


def catalog_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def catalog_entry(name: str, **params: int) -> CatalogEntry:
    """Build a catalog integrand by name; unknown names are rejected."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown integrand {name!r}; catalog: {catalog_names()}")
    for key, value in params.items():
        if not isinstance(value, int) or value < 1:
            raise ValueError(f"{name}: parameter {key} must be a positive integer")
    try:
        entry = _BUILDERS[name](**params)
    except TypeError as exc:
        raise ValueError(f"{name}: {exc}") from None
    if entry.arity > MAX_CATALOG_ARITY:
        raise ValueError(
            f"{entry.label()}: arity {entry.arity} exceeds {MAX_CATALOG_ARITY}"
        )
    return entry


def default_catalog(max_d: int = 6, max_combined: int = 3) -> list[CatalogEntry]:
    """The entry set exercised by `gridcover verify` and the acceptance run."""
    entries = [catalog_entry("offset-product", d=d) for d in range(1, max_d + 1)]
    entries += [catalog_entry("max-offset-plus-half", d=d) for d in range(1, max_d + 1)]
    entries += [catalog_entry("span-product", d=d) for d in range(1, max_d + 1)]
    entries += [
        catalog_entry("max-offset-span-combined", d=d, m=m)
        for d in range(1, max_combined + 1)
        for m in range(1, max_combined + 1)
    ]
    entries.append(catalog_entry("pair-overlap-1d"))
    entries.append(catalog_entry("triple-overlap-1d"))
    entries.append(catalog_entry("overlap-1d", ell=4))
    entries += [
        catalog_entry("multi-grid-union", m=m, d=d)
        for m in range(1, 4)
        for d in range(1, 4)
    ]
    entries.append(catalog_entry("unit-constant", arity=1))
    return entries


@dataclass(frozen=True)
class OracleResult:
    """A numeric integral value with an explicit absolute-error tolerance."""

    value: float
    tolerance: float
    method: str
    evaluations: int


def integrate_tensor(
    entry: CatalogEntry, points_per_axis: int, domain: BoxDomain | None = None
) -> OracleResult:
    """Tensor-product midpoint rule over the entry's (or an override) box.

    Tolerance is the conservative bound 2 * arity / points_per_axis; doubling
    points_per_axis halves it. Evaluation is chunked along the first axis so
    the full mesh is never materialized.
    """
    box = entry.domain if domain is None else domain
    if box.arity != entry.arity:
        raise ValueError("domain arity does not match integrand arity")
    if box.arity > MAX_TENSOR_ARITY:
        raise ValueError(
            f"tensor rule supports arity <= {MAX_TENSOR_ARITY}, got {box.arity}"
        )
    if points_per_axis < 1:
        raise ValueError("points_per_axis must be >= 1")
    total = points_per_axis**box.arity
    if total > MAX_TENSOR_GRID:
        raise ValueError(
            f"grid of {total} points exceeds the {MAX_TENSOR_GRID} limit"
        )

    lowers, uppers = box.lowers, box.uppers
    steps = (uppers - lowers) / points_per_axis
    axes = [
        lowers[j] + (np.arange(points_per_axis) + 0.5) * steps[j]
        for j in range(box.arity)
    ]
    cell_volume = float(np.prod(steps))

    chunk_sums = []
    rest = axes[1:]
    if rest:
        mesh_rest = np.meshgrid(*rest, indexing="ij")
        flat_rest = np.stack([g.ravel() for g in mesh_rest], axis=1)
    else:
        flat_rest = np.zeros((1, 0))
    block = np.empty((flat_rest.shape[0], box.arity))
    block[:, 1:] = flat_rest
    for x0 in axes[0]:
        block[:, 0] = x0
        chunk_sums.append(float(entry.fn(block).sum()))
    value = fsum(chunk_sums) * cell_volume
    tolerance = 2.0 * box.arity / points_per_axis
    return OracleResult(value, tolerance, "tensor-midpoint", total)


def integrate_mc(
    entry: CatalogEntry,
    samples: int,
    seed: int,
    domain: BoxDomain | None = None,
) -> OracleResult:
    """Plain Monte Carlo with a 4-standard-error tolerance.

    Deterministic per seed: draws come from one PCG64 stream in fixed blocks
    and the accumulation order never changes.
    """
    box = entry.domain if domain is None else domain
    if box.arity != entry.arity:
        raise ValueError("domain arity does not match integrand arity")
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_MC_SAMPLES}, got {samples}")

    lowers, uppers = box.lowers, box.uppers
    widths = uppers - lowers
    volume = box.volume
    rng = np.random.default_rng(seed)

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        k = min(_MC_BLOCK, samples - done)
        x = lowers + rng.random((k, box.arity)) * widths
        values = entry.fn(x)
        total += float(values.sum())
        total_sq += float(np.square(values).sum())
        done += k

    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    stderr = volume * (variance / samples) ** 0.5
    return OracleResult(volume * mean, 4.0 * stderr, "monte-carlo", samples)
