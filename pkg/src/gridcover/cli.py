"""Command-line entry point.

Subcommands:

* constants    print the exact integral table
* predict      exact coverage probability for one (m, ell, d)
* simulate     Monte Carlo estimate with standard error and z-score
* sweep        simulate a (m, d) grid at fixed ell
* verify       numeric quadrature cross-check of every catalog integral
* index-bench  torus index recall experiment vs the model prediction
* diagnose     show both readings of two ambiguous printed formulas next to
               simulation/quadrature evidence

Every run embeds its fully resolved configuration (seed included; defaulted
from entropy when not given) in the output, and re-running with an identical
embedded config reproduces the JSON output byte for byte.

Exit codes: 0 success, 2 invalid arguments or domain validation failure,
1 internal failure (verify also exits 1 when a cross-check lands outside its
tolerance).
"""

from __future__ import annotations

import argparse
import secrets
import sys
from dataclasses import dataclass
from fractions import Fraction

from .analytic import (
    combined_integral,
    combined_integral_role_swapped,
    integral_table,
    p_at_least_ell,
    p_at_least_one,
    p_at_least_one_literal,
)
from .geometry import CoverageSpec
from .index import recall_experiment
from .oracle import (
    MAX_TENSOR_ARITY,
    CatalogEntry,
    OracleResult,
    catalog_entry,
    default_catalog,
    integrate_mc,
    integrate_tensor,
)
from .report import Row, render
from .simulate import child_seed, estimate, estimate_pointwise, normalize_spec, sweep

__all__ = ["RunConfig", "main"]

# Midpoint mesh sizes used by verify/diagnose, keyed by integrand arity.
_TENSOR_POINTS = {1: 20000, 2: 1000, 3: 140, 4: 56}


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of one CLI run, echoed verbatim in every output."""

    subcommand: str
    m: int | None
    ell: int | None
    d: int | None
    b: float
    s: float
    samples: int | None
    seed: int
    output_format: str
    output_path: str | None
    extras: tuple[tuple[str, object], ...] = ()

    def to_dict(self) -> dict:
        # output_path is deliberately left out: where the report lands must
        # not change its bytes
        doc = {
            "subcommand": self.subcommand,
            "m": self.m,
            "ell": self.ell,
            "d": self.d,
            "b": self.b,
            "s": self.s,
            "samples": self.samples,
            "seed": self.seed,
            "format": self.output_format,
        }
        doc.update(dict(self.extras))
        return doc


def _resolve_seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else secrets.randbits(62)


def _config(args, seed, *, m=None, ell=None, d=None, samples=None, **extras) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        m=m,
        ell=ell,
        d=d,
        b=1.0,
        s=1.0,
        samples=samples,
        seed=seed,
        output_format=args.format,
        output_path=args.out,
        extras=tuple(sorted(extras.items())),
    )


def _exact_row(m: int, ell: int, d: int, method: str, value: Fraction) -> Row:
    return Row(m, ell, d, method, f"{value.numerator}/{value.denominator}", float(value))


def _entry_dims(entry: CatalogEntry) -> tuple[int, int, int]:
    """Map a catalog entry's size parameters onto the fixed (m, ell, d) columns."""
    name, params = entry.name, entry.params
    if name == "pair-overlap-1d":
        return 1, 2, 1
    if name == "triple-overlap-1d":
        return 1, 3, 1
    if name == "overlap-1d":
        return 1, params["ell"], 1
    if name == "multi-grid-union":
        return params["m"], 1, params["d"]
    if name == "unit-constant":
        return 0, 0, params["arity"]
    return params.get("m", 0), 0, params.get("d", 0)


def _oracle_row(entry: CatalogEntry, result: OracleResult, analytic: Fraction) -> Row:
    m, ell, d = _entry_dims(entry)
    discrepancy = abs(result.value - float(analytic)) / result.tolerance
    return Row(
        m,
        ell,
        d,
        f"{result.method}:{entry.label()}",
        result.value,
        result.value,
        result.tolerance,
        analytic,
        discrepancy,
    )


def _estimate_rows(spec: CoverageSpec, est, requested: CoverageSpec) -> list[Row]:
    analytic = p_at_least_ell(spec.m, spec.ell, spec.d)
    if est.stderr > 0.0:
        z = (est.mean - float(analytic)) / est.stderr
    else:
        z = 0.0 if est.mean == float(analytic) else None
    return [
        Row(
            requested.m,
            requested.ell,
            requested.d,
            est.method,
            est.mean,
            est.mean,
            est.stderr,
            analytic,
            z,
        )
    ]


def _cmd_constants(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    entries = integral_table(args.max_d, args.max_combined)
    rows = [
        _exact_row(
            e.params.get("m", 0),
            0,
            e.params.get("d", 0),
            f"exact:{e.identifier}",
            e.value,
        )
        for e in entries
    ]
    config = _config(args, seed, max_d=args.max_d, max_combined=args.max_combined)
    return config, rows, 0


def _cmd_predict(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    requested = CoverageSpec(args.m, args.ell, args.d)
    spec, _ = normalize_spec(requested)
    value = p_at_least_ell(spec.m, spec.ell, spec.d)
    rows = [_exact_row(requested.m, requested.ell, requested.d, "analytic", value)]
    config = _config(args, seed, m=args.m, ell=args.ell, d=args.d)
    return config, rows, 0


def _cmd_simulate(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    requested = CoverageSpec(args.m, args.ell, args.d)
    if args.pointwise:
        est = estimate_pointwise(requested, args.samples, args.points, seed)
    else:
        est = estimate(requested, args.samples, seed)
    rows = _estimate_rows(est.spec, est, requested)
    config = _config(
        args,
        seed,
        m=args.m,
        ell=args.ell,
        d=args.d,
        samples=args.samples,
        pointwise=args.pointwise,
        points=args.points if args.pointwise else None,
    )
    return config, rows, 0


def _cmd_sweep(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    specs = [
        CoverageSpec(m, args.ell, d)
        for m in range(1, args.max_m + 1)
        for d in range(1, args.max_d + 1)
    ]
    rows = []
    for row in sweep(specs, args.samples, seed):
        est = row.estimate
        rows.append(
            Row(
                row.spec.m,
                row.spec.ell,
                row.spec.d,
                est.method,
                est.mean,
                est.mean,
                est.stderr,
                row.analytic,
                row.z,
            )
        )
    config = _config(
        args,
        seed,
        ell=args.ell,
        samples=args.samples,
        max_m=args.max_m,
        max_d=args.max_d,
    )
    return config, rows, 0


def _verify_entry(entry: CatalogEntry, samples: int, seed: int) -> OracleResult:
    if entry.arity <= MAX_TENSOR_ARITY:
        return integrate_tensor(entry, _TENSOR_POINTS[entry.arity])
    return integrate_mc(entry, samples, seed)


def _cmd_verify(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    rows = []
    failures = 0
    for index, entry in enumerate(default_catalog(args.max_d, args.max_combined)):
        result = _verify_entry(entry, args.samples, child_seed(seed, index))
        row = _oracle_row(entry, result, entry.exact)
        if row.z is not None and row.z > 1.0:
            failures += 1
        rows.append(row)
    config = _config(
        args,
        seed,
        samples=args.samples,
        max_d=args.max_d,
        max_combined=args.max_combined,
    )
    return config, rows, 1 if failures else 0


def _cmd_index_bench(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    report = recall_experiment(args.n, args.d, args.L, args.m, args.queries, seed)
    z = (
        (report.mean_recall - float(report.predicted)) / report.stderr
        if report.stderr > 0.0
        else None
    )
    rows = [
        Row(
            args.m,
            1,
            args.d,
            "index-recall",
            report.mean_recall,
            report.mean_recall,
            report.stderr,
            report.predicted,
            z,
        ),
        Row(
            args.m,
            1,
            args.d,
            "candidate-fraction",
            report.mean_candidate_fraction,
            report.mean_candidate_fraction,
        ),
        Row(args.m, 1, args.d, "redraws", report.redraws, float(report.redraws)),
    ]
    config = _config(
        args, seed, m=args.m, d=args.d, n=args.n, L=args.L, queries=args.queries
    )
    return config, rows, 0


def _cmd_diagnose(args) -> tuple[RunConfig, list[Row], int]:
    seed = _resolve_seed(args)
    if args.m < 2:
        raise ValueError("diagnose needs m >= 2 to compare the two union readings")
    corrected = p_at_least_one(args.m, args.d)
    literal = p_at_least_one_literal(args.m, args.d)
    est = estimate(CoverageSpec(args.m, 1, args.d), args.samples, seed)
    rows = [
        _exact_row(args.m, 1, args.d, "analytic:at-least-one", corrected),
        _exact_row(args.m, 1, args.d, "analytic:at-least-one-literal-final-term", literal),
        Row(
            args.m,
            1,
            args.d,
            "exact-volume",
            est.mean,
            est.mean,
            est.stderr,
            corrected,
            (est.mean - float(corrected)) / est.stderr,
        ),
        Row(
            args.m,
            1,
            args.d,
            "exact-volume-vs-literal",
            est.mean,
            est.mean,
            est.stderr,
            literal,
            (est.mean - float(literal)) / est.stderr,
        ),
    ]

    group, pairs = args.group, args.pairs
    corr = combined_integral(group, pairs)
    swapped = combined_integral_role_swapped(group, pairs)
    entry = catalog_entry("max-offset-span-combined", d=group, m=pairs)
    quad = integrate_mc(entry, max(args.samples, 10**4), child_seed(seed, 1))
    rows.append(_exact_row(pairs, 0, group, "analytic:combined", corr))
    rows.append(_exact_row(pairs, 0, group, "analytic:combined-role-swapped", swapped))
    rows.append(_oracle_row(entry, quad, corr))
    vs_swapped = _oracle_row(entry, quad, swapped)
    rows.append(
        Row(
            vs_swapped.m,
            vs_swapped.ell,
            vs_swapped.d,
            f"{quad.method}:combined-vs-role-swapped",
            vs_swapped.value,
            vs_swapped.decimal,
            vs_swapped.stderr,
            swapped,
            vs_swapped.z,
        )
    )
    config = _config(
        args,
        seed,
        m=args.m,
        ell=1,
        d=args.d,
        samples=args.samples,
        group=group,
        pairs=pairs,
    )
    return config, rows, 0


_HANDLERS = {
    "constants": _cmd_constants,
    "predict": _cmd_predict,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "index-bench": _cmd_index_bench,
    "diagnose": _cmd_diagnose,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcover",
        description="exact and simulated coverage probabilities for offset unit grids",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def output_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv", "human"), default="json")
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("constants", help="print the exact integral table")
    p.add_argument("--max-d", type=int, default=6)
    p.add_argument("--max-combined", type=int, default=3)
    output_flags(p)

    p = sub.add_parser("predict", help="exact coverage probability")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    output_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo coverage estimate")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--pointwise", action="store_true",
                   help="two-stage point sampling (any m, d)")
    p.add_argument("--points", type=int, default=1000,
                   help="query points per cell set in pointwise mode")
    output_flags(p)

    p = sub.add_parser("sweep", help="simulate an (m, d) grid at fixed ell")
    p.add_argument("--max-m", type=int, default=3)
    p.add_argument("--max-d", type=int, default=3)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--samples", type=int, default=200_000)
    output_flags(p)

    p = sub.add_parser("verify", help="quadrature cross-check of the catalog")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="Monte Carlo samples for entries beyond tensor arity")
    p.add_argument("--max-d", type=int, default=6)
    p.add_argument("--max-combined", type=int, default=3)
    output_flags(p)

    p = sub.add_parser("index-bench", help="torus index recall experiment")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--queries", type=int, default=500)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    output_flags(p)

    p = sub.add_parser("diagnose", help="adjudicate two ambiguous printed formulas")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--group", type=int, default=2,
                   help="max-offset group size of the combined integral")
    p.add_argument("--pairs", type=int, default=1,
                   help="span pair count of the combined integral")
    output_flags(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config, rows, rc = _HANDLERS[args.subcommand](args)
        text = render(config.to_dict(), rows, args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return rc


if __name__ == "__main__":
    sys.exit(main())
