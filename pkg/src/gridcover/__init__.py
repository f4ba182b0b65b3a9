"""Coverage probabilities for randomly offset unit grids.

A query cube of side 1 is intersected with m independently offset unit
grids; each grid contributes the one cell containing the origin of the
query's coordinate frame. The package computes the expected volume of the
region covered by at least ell of those cells, three independent ways:

* exact rational formulas (:mod:`gridcover.analytic`),
* exact per-realization volumes via slab decomposition, averaged over
  random offsets (:mod:`gridcover.geometry`, :mod:`gridcover.simulate`),
* numeric integration of the defining integrals (:mod:`gridcover.oracle`).

:mod:`gridcover.index` applies the model to bucketed nearest-neighbor
search on a torus and measures actual recall against the prediction.
"""

from .analytic import (
    IntegralEntry,
    QuadrantTerm,
    combined_integral,
    combined_integral_role_swapped,
    fraction_str,
    integral_table,
    max_offset_integral,
    p_at_least_ell,
    p_at_least_one,
    p_at_least_one_literal,
    p_one_of_one_overlap,
    p_one_of_one_overlap_dd,
    p_single,
    quadrant_terms,
    span_integral,
)
from .geometry import (
    MAX_EXACT_CELLS,
    MAX_EXACT_DIMS,
    CellSet,
    ClippedIntervalSet,
    CoverageSpec,
    DecompositionLimitError,
    clip_to_query,
    coverage_volume,
    coverage_volumes,
    sample_cell_set,
)
from .index import (
    MultiGridIndex,
    PointDataset,
    RecallReport,
    build,
    generate_dataset,
    load_dataset,
    query_candidates,
    range_query_exact,
    recall_experiment,
    save_dataset,
)
from .oracle import (
    BoxDomain,
    CatalogEntry,
    OracleResult,
    catalog_entry,
    default_catalog,
    integrate_mc,
    integrate_tensor,
)
from .report import CSV_HEADER, REPORT_SCHEMA, Row, render
from .simulate import (
    Estimate,
    SweepRow,
    child_seed,
    estimate,
    estimate_pointwise,
    normalize_spec,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BoxDomain",
    "CSV_HEADER",
    "CatalogEntry",
    "CellSet",
    "ClippedIntervalSet",
    "CoverageSpec",
    "DecompositionLimitError",
    "Estimate",
    "IntegralEntry",
    "MAX_EXACT_CELLS",
    "MAX_EXACT_DIMS",
    "MultiGridIndex",
    "OracleResult",
    "PointDataset",
    "QuadrantTerm",
    "REPORT_SCHEMA",
    "RecallReport",
    "Row",
    "SweepRow",
    "build",
    "catalog_entry",
    "child_seed",
    "clip_to_query",
    "combined_integral",
    "combined_integral_role_swapped",
    "coverage_volume",
    "coverage_volumes",
    "default_catalog",
    "estimate",
    "estimate_pointwise",
    "fraction_str",
    "generate_dataset",
    "integral_table",
    "integrate_mc",
    "integrate_tensor",
    "load_dataset",
    "max_offset_integral",
    "normalize_spec",
    "p_at_least_ell",
    "p_at_least_one",
    "p_at_least_one_literal",
    "p_one_of_one_overlap",
    "p_one_of_one_overlap_dd",
    "p_single",
    "quadrant_terms",
    "query_candidates",
    "range_query_exact",
    "recall_experiment",
    "render",
    "sample_cell_set",
    "save_dataset",
    "span_integral",
    "sweep",
    "__version__",
]
