#!/usr/bin/env python3
"""Run the full validation chain and drop JSON reports in an output directory.

Order: exact constants table, quadrature cross-check of every catalog
integral, simulator sweep against the closed forms, and the diagnosis of the
two ambiguous printed formulas. A short verdict per stage goes to stdout;
the detailed reports land in --outdir.
"""

import argparse
import json
import secrets
import sys
from pathlib import Path

from gridcover.cli import main as gridcover_main


def run(outdir: Path, name: str, argv: list[str]) -> dict:
    path = outdir / f"{name}.json"
    rc = gridcover_main(argv + ["--out", str(path)])
    if rc not in (0,):
        print(f"{name}: exit code {rc}", file=sys.stderr)
        raise SystemExit(rc)
    return json.loads(path.read_text())


def worst_z(doc: dict) -> float:
    zs = [abs(r["z"]) for r in doc["rows"] if r.get("z") is not None]
    return max(zs) if zs else 0.0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=Path, default=Path("validation_out"))
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=200_000)
    args = parser.parse_args()

    seed = args.seed if args.seed is not None else secrets.randbits(62)
    args.outdir.mkdir(parents=True, exist_ok=True)
    print(f"writing reports to {args.outdir}/ (seed {seed})")

    constants = run(args.outdir, "constants", ["constants", "--seed", str(seed)])
    print(f"constants: {len(constants['rows'])} exact table entries")

    verify = run(args.outdir, "verify",
                 ["verify", "--samples", "1000000", "--seed", str(seed)])
    print(f"verify: {len(verify['rows'])} integrals, worst tolerance ratio "
          f"{worst_z(verify):.3f} (must stay below 1)")

    sweep = run(args.outdir, "sweep",
                ["sweep", "--max-m", "3", "--max-d", "3",
                 "--samples", str(args.samples), "--seed", str(seed)])
    print(f"sweep: {len(sweep['rows'])} specs, worst |z| {worst_z(sweep):.2f}")

    diagnose = run(args.outdir, "diagnose",
                   ["diagnose", "--samples", str(args.samples), "--seed", str(seed)])
    by_method = {r["method"]: r for r in diagnose["rows"]}
    ok = abs(by_method["exact-volume"]["z"])
    bad = abs(by_method["exact-volume-vs-literal"]["z"])
    print(f"diagnose: corrected union formula at {ok:.1f} sigma, "
          f"literal final term at {bad:.0f} sigma")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
