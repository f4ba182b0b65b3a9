"""Coverage-volume geometry: frozen examples, independent oracles, invariants.

Two oracles cross-check the slab-decomposition volumes. In 1-d a sweep over
sorted interval endpoints gives the at-least-ell length exactly; in higher
dimensions a seeded membership count over uniform points brackets the volume
statistically.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gridcover.geometry import (
    MAX_EXACT_CELLS,
    MAX_EXACT_DIMS,
    CellSet,
    CoverageSpec,
    DecompositionLimitError,
    clip_to_query,
    coverage_volume,
    coverage_volumes,
    sample_cell_set,
)


def sweep_coverage_1d(offsets: np.ndarray, ell: int) -> float:
    """Length covered by >= ell of the clipped cells, by endpoint sweep."""
    events = []
    for (u,) in offsets:
        lo, hi = max(u - 1.0, -0.5), min(u, 0.5)
        events.append((lo, 1))
        events.append((hi, -1))
    events.sort()
    depth, total, prev = 0, 0.0, None
    for x, step in events:
        if prev is not None and depth >= ell:
            total += x - prev
        depth += step
        prev = x
    return total


def membership_fraction(offsets: np.ndarray, ell: int, rng, n: int) -> tuple[float, float]:
    """Monte Carlo fraction of the query cube covered >= ell times."""
    m, d = offsets.shape
    pts = rng.random((n, d)) - 0.5
    inside = np.ones((n, m), dtype=np.int64)
    for i in range(m):
        lo = np.maximum(offsets[i] - 1.0, -0.5)
        hi = np.minimum(offsets[i], 0.5)
        inside[:, i] = ((pts >= lo) & (pts < hi)).all(axis=1)
    hits = (inside.sum(axis=1) >= ell).astype(np.float64)
    return float(hits.mean()), float(hits.std(ddof=1) / np.sqrt(n))


class TestFrozenExamples:
    def test_two_cells_one_dim(self):
        # offsets 0.1 and 0.4 clip to [-0.5, 0.1) and [-0.5, 0.4): union has
        # length 0.9 and the overlap is the shorter cell, 0.6
        cells = CellSet(np.array([[0.1], [0.4]]))
        assert coverage_volume(cells, 1) == pytest.approx(0.9, abs=1e-12)
        assert coverage_volume(cells, 2) == pytest.approx(0.6, abs=1e-12)

    def test_two_cells_two_dims(self):
        # areas 0.6*0.7 = 0.42 and 0.9*0.8 = 0.72; the first box is nested in
        # the second, so the union is 0.72 and the overlap 0.42
        cells = CellSet(np.array([[0.1, 0.2], [0.4, 0.3]]))
        assert coverage_volume(cells, 1) == pytest.approx(0.72, abs=1e-12)
        assert coverage_volume(cells, 2) == pytest.approx(0.42, abs=1e-12)

    def test_single_cell_is_clipped_box(self):
        cells = CellSet(np.array([[0.25, 0.75, 0.5]]))
        assert coverage_volume(cells, 1) == pytest.approx(0.75 * 0.75 * 1.0, abs=1e-12)

    def test_zero_offset_cell_fills_lower_half(self):
        # u = 0 leaves [-0.5, 0), exactly half of the query per dimension
        cells = CellSet(np.zeros((1, 2)))
        assert coverage_volume(cells, 1) == pytest.approx(0.25, abs=1e-12)


class TestAgainstSweepOracle:
    @pytest.mark.parametrize("seed", range(12))
    def test_random_one_dim_configurations(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 7))
        offsets = rng.random((m, 1))
        cells = CellSet(offsets)
        for ell in range(1, m + 1):
            expected = sweep_coverage_1d(offsets, ell)
            assert coverage_volume(cells, ell) == pytest.approx(expected, abs=1e-12)


class TestAgainstMembershipOracle:
    @pytest.mark.parametrize("seed", range(8))
    def test_random_multidim_configurations(self, seed):
        rng = np.random.default_rng(1000 + seed)
        m = int(rng.integers(1, 5))
        d = int(rng.integers(2, 4))
        ell = int(rng.integers(1, m + 1))
        offsets = rng.random((m, d))
        exact = coverage_volume(CellSet(offsets), ell)
        mc, stderr = membership_fraction(offsets, ell, rng, 200_000)
        assert abs(exact - mc) <= max(5 * stderr, 1e-4)


class TestBatchConsistency:
    def test_batch_equals_scalar(self):
        rng = np.random.default_rng(77)
        batch = rng.random((100, 3, 2))
        for ell in (1, 2, 3):
            vectorized = coverage_volumes(batch, ell)
            loop = np.array([coverage_volume(CellSet(o), ell) for o in batch])
            np.testing.assert_allclose(vectorized, loop, rtol=0, atol=1e-12)

    def test_batch_equals_scalar_at_limits(self):
        rng = np.random.default_rng(78)
        batch = rng.random((5, MAX_EXACT_CELLS, 4))
        for ell in (1, MAX_EXACT_CELLS):
            vectorized = coverage_volumes(batch, ell)
            loop = np.array([coverage_volume(CellSet(o), ell) for o in batch])
            np.testing.assert_allclose(vectorized, loop, rtol=0, atol=1e-12)

    def test_threshold_above_count_is_zero(self):
        rng = np.random.default_rng(79)
        batch = rng.random((10, 2, 2))
        assert np.all(coverage_volumes(batch, 3) == 0.0)
        assert coverage_volume(CellSet(batch[0]), 3) == 0.0


offset_arrays = arrays(
    np.float64,
    st.tuples(st.integers(1, 4), st.integers(1, 3)),
    elements=st.floats(0.0, 1.0, exclude_max=True, allow_nan=False),
)


class TestProperties:
    @given(offsets=offset_arrays)
    @settings(max_examples=80, deadline=None)
    def test_volume_in_unit_interval(self, offsets):
        vol = coverage_volume(CellSet(offsets), 1)
        assert 0.0 <= vol <= 1.0

    @given(offsets=offset_arrays)
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_threshold(self, offsets):
        cells = CellSet(offsets)
        vols = [coverage_volume(cells, ell) for ell in range(1, offsets.shape[0] + 2)]
        assert all(a >= b for a, b in zip(vols, vols[1:]))
        assert vols[-1] == 0.0

    @given(
        offsets=offset_arrays,
        extra=st.floats(0.0, 1.0, exclude_max=True, allow_nan=False),
    )
    @settings(max_examples=60, deadline=None)
    def test_adding_a_cell_never_shrinks_coverage(self, offsets, extra):
        m, d = offsets.shape
        grown = np.vstack([offsets, np.full((1, d), extra)])
        for ell in range(1, m + 1):
            assert coverage_volume(CellSet(grown), ell) >= coverage_volume(
                CellSet(offsets), ell
            ) - 1e-12

    @given(offsets=offset_arrays)
    @settings(max_examples=60, deadline=None)
    def test_single_cell_volume_is_length_product(self, offsets):
        row = offsets[:1]
        lengths = np.minimum(row[0], 0.5) - np.maximum(row[0] - 1.0, -0.5)
        assert coverage_volume(CellSet(row), 1) == pytest.approx(
            float(np.prod(lengths)), abs=1e-12
        )


class TestClipping:
    def test_clip_bounds(self):
        cells = CellSet(np.array([[0.3, 0.9]]))
        clipped = clip_to_query(cells)
        np.testing.assert_allclose(clipped.lowers, [[-0.5, -0.1]])
        np.testing.assert_allclose(clipped.uppers, [[0.3, 0.5]])

    def test_lengths(self):
        cells = CellSet(np.array([[0.3], [0.6]]))
        clipped = clip_to_query(cells)
        np.testing.assert_allclose(clipped.lengths(), [[0.8], [0.9]])

    def test_intervals_accessor(self):
        clipped = clip_to_query(CellSet(np.array([[0.25, 0.75]])))
        (lo, hi), = clipped.intervals(1)
        assert (lo, hi) == (-0.25, 0.5)


class TestValidation:
    def test_offsets_must_lie_in_unit_interval(self):
        with pytest.raises(ValueError):
            CellSet(np.array([[1.0]]))
        with pytest.raises(ValueError):
            CellSet(np.array([[-0.1]]))

    def test_offsets_are_immutable(self):
        cells = CellSet(np.array([[0.5]]))
        with pytest.raises(ValueError):
            cells.offsets[0, 0] = 0.1

    def test_cell_count_limit(self):
        offsets = np.full((MAX_EXACT_CELLS + 1, 1), 0.5)
        with pytest.raises(DecompositionLimitError):
            coverage_volume(CellSet(offsets), 1)

    def test_dimension_limit(self):
        offsets = np.full((1, MAX_EXACT_DIMS + 1), 0.5)
        with pytest.raises(DecompositionLimitError):
            coverage_volume(CellSet(offsets), 1)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            CoverageSpec(0, 1, 1)
        with pytest.raises(ValueError):
            CoverageSpec(1, 0, 1)
        with pytest.raises(ValueError):
            CoverageSpec(1, 1, 0)
        with pytest.raises(ValueError):
            CoverageSpec(1, 1, 1, b=1.0, s=2.0)

    def test_sample_cell_set_shape_and_range(self):
        rng = np.random.default_rng(5)
        cells = sample_cell_set(rng, CoverageSpec(3, 1, 2))
        assert cells.offsets.shape == (3, 2)
        assert cells.offsets.min() >= 0.0 and cells.offsets.max() < 1.0
