"""Exact rational coverage probabilities for randomly offset unit grids.

Every function returns a `fractions.Fraction` computed in exact integer
arithmetic, no floats anywhere. The chain of results:

* `p_single(d)`: one cell, expected covered fraction of the query, (3/4)^d.
* `p_one_of_one_overlap(ell)`: expected 1-d length covered simultaneously by
  ell independent cells. Computed as a sum over the 2^ell sign quadrants of
  the centered offsets, collapsed by symmetry to a binomial sum over how many
  offsets are nonnegative. Each quadrant integrand is
  1 - max(nonnegative group) + min(negative group) with empty groups
  contributing zero, and order-statistic expectations close the integral.
* `p_one_of_one_overlap_dd(ell, d)`: the d-dimensional overlap, the 1-d value
  raised to the d-th power by independence across dimensions.
* `p_at_least_one(m, d)`: union coverage of m cells by inclusion-exclusion
  over the overlap values.
* `p_at_least_ell(m, ell, d)`: general at-least-ell coverage via the standard
  inclusion-exclusion identity for exchangeable events. The 1 < ell < m range
  has no printed closed form upstream of this package; it is the natural
  derived extension and is validated against the simulator in tests.

`integral_table` enumerates the exact values of the one-dimensional building
blocks so they can be printed, exported, and cross-checked numerically by
`gridcover.oracle`. The `*_literal` / `*_role_swapped` variants reproduce two
internally inconsistent printed formulas verbatim so the `diagnose` command
can show both readings next to simulator evidence; see those docstrings.

All functions are pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

__all__ = [
    "QuadrantTerm",
    "IntegralEntry",
    "fraction_str",
    "quadrant_terms",
    "p_single",
    "p_one_of_one_overlap",
    "p_one_of_one_overlap_dd",
    "p_at_least_one",
    "p_at_least_one_literal",
    "p_at_least_ell",
    "max_offset_integral",
    "span_integral",
    "combined_integral",
    "combined_integral_role_swapped",
    "integral_table",
]

HALF = Fraction(1, 2)


def _check_positive(**kwargs: int) -> None:
    for name, value in kwargs.items():
        if not isinstance(value, int) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


def fraction_str(value: Fraction) -> str:
    """Serialize a Fraction as "numerator/denominator" (0 becomes "0/1")."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class QuadrantTerm:
    """One sign-quadrant contribution to the 1-d overlap integral.

    `nonnegative` offsets lie in [0, 1/2], `negative` in [-1/2, 0); `weight`
    counts the C(ell, i) quadrants collapsed into this term and `value` is the
    exact integral of the covered length over a single quadrant.
    """

    nonnegative: int
    negative: int
    weight: int
    value: Fraction


def _expected_extreme(count: int) -> Fraction:
    """E[max of `count` iid uniforms on [0, 1/2]]; 0 for an empty group."""
    if count == 0:
        return Fraction(0)
    return Fraction(count, 2 * (count + 1))


def quadrant_terms(ell: int) -> list[QuadrantTerm]:
    """Decompose the 1-d ell-cell overlap integral by offset sign pattern.

    The covered length for centered offsets x_1..x_ell is
    1 - max(x_i : x_i >= 0, default 0) + min(x_i : x_i < 0, default 0); within
    a quadrant with i nonnegative and k = ell - i negative offsets the
    expectations of the two extremes are i/(2(i+1)) and -k/(2(k+1)).
    """
    _check_positive(ell=ell)
    quadrant_measure = HALF**ell
    terms = []
    for i in range(ell + 1):
        k = ell - i
        mean_length = 1 - _expected_extreme(i) - _expected_extreme(k)
        terms.append(
            QuadrantTerm(
                nonnegative=i,
                negative=k,
                weight=comb(ell, i),
                value=quadrant_measure * mean_length,
            )
        )
    return terms


def p_single(d: int) -> Fraction:
    """Expected query fraction covered by one random cell: (3/4)^d."""
    _check_positive(d=d)
    return Fraction(3, 4) ** d


def p_one_of_one_overlap(ell: int) -> Fraction:
    """Expected 1-d length covered by all of ell independent cells at once."""
    return sum(
        (term.weight * term.value for term in quadrant_terms(ell)), Fraction(0)
    )


def p_one_of_one_overlap_dd(ell: int, d: int) -> Fraction:
    """d-dimensional all-of-ell overlap volume; dimensions are independent."""
    _check_positive(ell=ell, d=d)
    return p_one_of_one_overlap(ell) ** d


def p_at_least_one(m: int, d: int) -> Fraction:
    """Expected query fraction covered by at least one of m cells."""
    _check_positive(m=m, d=d)
    return sum(
        (
            Fraction((-1) ** (j + 1) * comb(m, j)) * p_one_of_one_overlap_dd(j, d)
            for j in range(1, m + 1)
        ),
        Fraction(0),
    )


def p_at_least_one_literal(m: int, d: int) -> Fraction:
    """Union coverage with the final inclusion-exclusion term downshifted.

    Reproduces, verbatim, a printed variant of the union formula whose last
    term is C(m,m) times the (m-1)-fold overlap instead of the m-fold one.
    Kept only so `diagnose` can display it against simulation; at m=3, d=1 it
    evaluates to 13/12, which already exceeds 1. Requires m >= 2.
    """
    _check_positive(m=m, d=d)
    if m < 2:
        raise ValueError("the literal variant is only defined for m >= 2")
    total = sum(
        (
            Fraction((-1) ** (j + 1) * comb(m, j)) * p_one_of_one_overlap_dd(j, d)
            for j in range(1, m)
        ),
        Fraction(0),
    )
    return total + Fraction((-1) ** (m + 1)) * p_one_of_one_overlap_dd(m - 1, d)


def p_at_least_ell(m: int, ell: int, d: int) -> Fraction:
    """Expected query fraction covered by at least ell of m cells.

    Returns 0 when ell > m. For 1 < ell < m this is the derived
    inclusion-exclusion extension over exchangeable overlaps (no printed
    closed form exists upstream); ell = 1 and ell = m reduce to
    `p_at_least_one` and `p_one_of_one_overlap_dd` respectively.
    """
    _check_positive(m=m, ell=ell, d=d)
    if ell > m:
        return Fraction(0)
    return sum(
        (
            Fraction((-1) ** (j - ell) * comb(j - 1, ell - 1) * comb(m, j))
            * p_one_of_one_overlap_dd(j, d)
            for j in range(ell, m + 1)
        ),
        Fraction(0),
    )


def max_offset_integral(group: int) -> Fraction:
    """Exact value of the integral of max(x_1..x_group) + 1/2 over [0, 1/2]^group.

    Equals (2g+1)/((g+1) * 2^(g+1)). This is the order-statistic form behind
    the printed d-fold table value; see `integral_table` for the naming note.
    """
    _check_positive(group=group)
    return Fraction(2 * group + 1, (group + 1) * 2 ** (group + 1))


def span_integral(pairs: int) -> Fraction:
    """Integral of the product of `pairs` cell spans (y_i - v_i): (1/8)^pairs."""
    _check_positive(pairs=pairs)
    return Fraction(1, 8) ** pairs


def combined_integral(group: int, pairs: int) -> Fraction:
    """Product-form integral mixing one max-offset group with span pairs.

    The group of `group` upper offsets contributes max_offset_integral(group)
    and each of the `pairs` independent (y - v) spans contributes 1/8; the
    integral factorizes exactly.
    """
    return max_offset_integral(group) * span_integral(pairs)


def combined_integral_role_swapped(group: int, pairs: int) -> Fraction:
    """The combined integral with the two size parameters exchanged.

    Reproduces a printed result whose group size and pair count trade places
    relative to its own integrand. Kept for `diagnose`, which shows quadrature
    rejecting it whenever group != pairs.
    """
    return max_offset_integral(pairs) * span_integral(group)


@dataclass(frozen=True)
class IntegralEntry:
    """One named exact integral: identifier, its size parameters, its value."""

    identifier: str
    params: dict[str, int]
    value: Fraction


def integral_table(max_d: int = 6, max_combined: int = 3) -> list[IntegralEntry]:
    """Enumerate the exact one-dimensional building-block integrals.

    Families (identifiers match `gridcover.oracle` catalog names):

    * offset-product(d):            integral of prod(x_i + 1/2) = (3/8)^d
    * max-offset-plus-half(d):      integral of max(x_i) + 1/2
                                    = (2d+1)/((d+1)*2^(d+1)), so 5/24 at d=2
    * span-product(d):              integral of prod(y_i - v_i) = (1/8)^d
    * max-offset-span-combined(d,m): product of the two factors above

    Naming note: max-offset-plus-half is written with a min in some quoted
    sources, but 5/24 and the general closed form are the max-order-statistic
    values (the literal min integrand gives (d+2)/((d+1)*2^(d+1)) = 1/6 at
    d=2); the identifier states what is actually integrated.
    """
    _check_positive(max_d=max_d, max_combined=max_combined)
    entries: list[IntegralEntry] = []
    for d in range(1, max_d + 1):
        entries.append(
            IntegralEntry("offset-product", {"d": d}, Fraction(3, 8) ** d)
        )
    for d in range(1, max_d + 1):
        entries.append(
            IntegralEntry("max-offset-plus-half", {"d": d}, max_offset_integral(d))
        )
    for d in range(1, max_d + 1):
        entries.append(IntegralEntry("span-product", {"d": d}, span_integral(d)))
    for d in range(1, max_combined + 1):
        for m in range(1, max_combined + 1):
            entries.append(
                IntegralEntry(
                    "max-offset-span-combined",
                    {"d": d, "m": m},
                    combined_integral(d, m),
                )
            )
    return entries
