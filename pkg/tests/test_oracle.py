"""Numeric integration of the catalog integrands against their exact values."""

from fractions import Fraction

import numpy as np
import pytest

from gridcover.analytic import p_at_least_one
from gridcover.oracle import (
    MAX_TENSOR_ARITY,
    BoxDomain,
    catalog_entry,
    default_catalog,
    integrate_mc,
    integrate_tensor,
)

# enough midpoints for a solid cross-check without dragging the suite
_POINTS = {1: 20000, 2: 600, 3: 80, 4: 36}


def test_tensor_offset_product_1d():
    entry = catalog_entry("offset-product", d=1)
    result = integrate_tensor(entry, 20000)
    assert result.method == "tensor-midpoint"
    assert result.evaluations == 20000
    assert abs(result.value - 0.375) <= result.tolerance


def test_tensor_max_offset_2d():
    entry = catalog_entry("max-offset-plus-half", d=2)
    result = integrate_tensor(entry, 500)
    assert abs(result.value - 5 / 24) <= result.tolerance


def test_tensor_max_offset_3d_is_accurate():
    # the integrand is piecewise smooth, so the midpoint rule does far better
    # than its conservative reported bound
    entry = catalog_entry("max-offset-plus-half", d=3)
    result = integrate_tensor(entry, 100)
    assert abs(result.value - 7 / 64) <= 1e-3


@pytest.mark.parametrize("d, exact", [(1, 0.375), (2, 9 / 64)])
def test_tensor_tight_accuracy_low_arity(d, exact):
    result = integrate_tensor(catalog_entry("offset-product", d=d), 2000)
    assert abs(result.value - exact) <= 1e-4


def test_tensor_tolerance_halves_with_double_points():
    entry = catalog_entry("offset-product", d=2)
    coarse = integrate_tensor(entry, 300)
    fine = integrate_tensor(entry, 600)
    assert fine.tolerance == pytest.approx(coarse.tolerance / 2)


def test_tensor_rejects_high_arity():
    entry = catalog_entry("max-offset-span-combined", d=3, m=1)
    assert entry.arity == 5
    with pytest.raises(ValueError):
        integrate_tensor(entry, 10)


def test_mc_deterministic():
    entry = catalog_entry("span-product", d=3)
    a = integrate_mc(entry, 50_000, seed=123)
    b = integrate_mc(entry, 50_000, seed=123)
    assert a.value == b.value and a.tolerance == b.tolerance
    c = integrate_mc(entry, 50_000, seed=124)
    assert c.value != a.value


def test_mc_brackets_exact_value():
    entry = catalog_entry("max-offset-span-combined", d=2, m=2)
    result = integrate_mc(entry, 400_000, seed=9)
    assert result.method == "monte-carlo"
    assert abs(result.value - float(entry.exact)) <= result.tolerance


def test_mc_stderr_shrinks_with_samples():
    entry = catalog_entry("offset-product", d=5)
    small = integrate_mc(entry, 100_000, seed=4)
    large = integrate_mc(entry, 1_600_000, seed=4)
    ratio = large.tolerance / small.tolerance
    assert 0.15 <= ratio <= 0.35  # 16x samples, expect ~1/4


def test_mc_minimum_samples():
    with pytest.raises(ValueError):
        integrate_mc(catalog_entry("offset-product", d=1), 100, seed=1)


def test_full_catalog_within_tolerance():
    for entry in default_catalog(6, 3):
        if entry.arity <= MAX_TENSOR_ARITY:
            result = integrate_tensor(entry, _POINTS[entry.arity])
        else:
            result = integrate_mc(entry, 200_000, seed=hash(entry.label()) % 2**32)
        err = abs(result.value - float(entry.exact))
        assert err <= result.tolerance, f"{entry.label()}: err={err}"


def test_union_entries_match_inclusion_exclusion():
    """The union integrand integrates to the alternating-sum probability.

    This identity ties the two analytic routes together through quadrature
    rather than through each other.
    """
    for m in (1, 2, 3):
        for d in (1, 2):
            entry = catalog_entry("multi-grid-union", m=m, d=d)
            assert entry.exact == p_at_least_one(m, d)
            result = integrate_tensor(entry, 400 if d == 2 else 20000)
            assert abs(result.value - float(entry.exact)) <= result.tolerance


def test_piecewise_overlap_agrees_with_compact_form():
    rng = np.random.default_rng(31)
    pair = catalog_entry("pair-overlap-1d")
    compact2 = catalog_entry("overlap-1d", ell=2)
    x = rng.uniform(-0.5, 0.5, size=(5000, 2))
    np.testing.assert_allclose(pair.fn(x), compact2.fn(x), atol=1e-14)

    triple = catalog_entry("triple-overlap-1d")
    compact3 = catalog_entry("overlap-1d", ell=3)
    y = rng.uniform(-0.5, 0.5, size=(5000, 3))
    np.testing.assert_allclose(triple.fn(y), compact3.fn(y), atol=1e-14)


def test_overlap_entries_match_closed_forms():
    assert catalog_entry("pair-overlap-1d").exact == Fraction(7, 12)
    assert catalog_entry("triple-overlap-1d").exact == Fraction(15, 32)
    assert catalog_entry("overlap-1d", ell=4).exact == Fraction(31, 80)


def test_domain_roles():
    dom = BoxDomain(("nonneg", "full", "nonpos"))
    assert dom.arity == 3
    np.testing.assert_allclose(dom.lowers, [0.0, -0.5, -0.5])
    np.testing.assert_allclose(dom.uppers, [0.5, 0.5, 0.0])
    assert dom.volume == pytest.approx(0.25)
    with pytest.raises(ValueError):
        BoxDomain(("sideways",))


def test_catalog_is_closed():
    with pytest.raises(ValueError):
        catalog_entry("no-such-integrand")
    with pytest.raises(ValueError):
        catalog_entry("offset-product", d=0)
    with pytest.raises(ValueError):
        catalog_entry("offset-product")  # missing parameter
    with pytest.raises(ValueError):
        catalog_entry("offset-product", d=40)  # arity cap


def test_catalog_labels_are_unique():
    labels = [e.label() for e in default_catalog(6, 3)]
    assert len(labels) == len(set(labels))
    assert "multi-grid-union(d=2,m=2)" in labels
