"""Shared report document: one schema for every subcommand's output.

A report is {"config": {...}, "rows": [...]}; each row has the nine fixed
fields m, ell, d, method, value, decimal, stderr, analytic, z. Column reuse is
by convention:

* catalog/oracle rows name their entry inside `method`
  ("tensor-midpoint:<entry>"), carry the oracle tolerance in `stderr`, and
  put |value - exact| / tolerance in `z`;
* simulation rows carry a standard error in `stderr`, the exact value in
  `analytic`, and (value - analytic) / stderr in `z`;
* exact rows (constants, predictions) put the fraction string in `value` and
  leave stderr/analytic/z null.

Size parameters that do not apply to a row are 0 (the schema keeps every
column an integer so CSV and JSON stay rectangular). JSON rendering is
canonical (sorted keys, two-space indent, trailing newline), so identical
documents are identical bytes. CSV prepends the config as "# key=value"
comment lines; the human format is a rendering of the same document, never a
separate computation path.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from fractions import Fraction

from .analytic import fraction_str

__all__ = ["CSV_HEADER", "REPORT_SCHEMA", "Row", "render"]

CSV_HEADER = "m,ell,d,method,value,decimal,stderr,analytic,z"

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "config": {"type": "object"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "m": {"type": "integer"},
                    "ell": {"type": "integer"},
                    "d": {"type": "integer"},
                    "method": {"type": "string"},
                    "value": {"type": ["string", "number"]},
                    "decimal": {"type": "number"},
                    "stderr": {"type": ["number", "null"]},
                    "analytic": {"type": ["string", "null"]},
                    "z": {"type": ["number", "null"]},
                },
                "required": [
                    "m",
                    "ell",
                    "d",
                    "method",
                    "value",
                    "decimal",
                    "stderr",
                    "analytic",
                    "z",
                ],
                "additionalProperties": False,
            },
        },
    },
    "required": ["config", "rows"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class Row:
    m: int
    ell: int
    d: int
    method: str
    value: str | float
    decimal: float
    stderr: float | None = None
    analytic: Fraction | None = None
    z: float | None = None

    def to_obj(self) -> dict:
        return {
            "m": self.m,
            "ell": self.ell,
            "d": self.d,
            "method": self.method,
            "value": self.value,
            "decimal": self.decimal,
            "stderr": self.stderr,
            "analytic": None if self.analytic is None else fraction_str(self.analytic),
            "z": self.z,
        }


def exact_row(m: int, ell: int, d: int, method: str, value: Fraction) -> Row:
    return Row(m, ell, d, method, fraction_str(value), float(value))


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _render_csv(doc: dict) -> str:
    out = io.StringIO()
    for key in sorted(doc["config"]):
        out.write(f"# {key}={doc['config'][key]}\n")
    out.write(CSV_HEADER + "\n")
    columns = CSV_HEADER.split(",")
    for row in doc["rows"]:
        out.write(",".join(_csv_cell(row[c]) for c in columns) + "\n")
    return out.getvalue()


def _render_human(doc: dict) -> str:
    out = io.StringIO()
    config = doc["config"]
    out.write(
        "config: "
        + " ".join(f"{k}={config[k]}" for k in sorted(config) if config[k] is not None)
        + "\n"
    )
    columns = CSV_HEADER.split(",")
    table = [columns] + [
        [_csv_cell(row[c]) or "-" for c in columns] for row in doc["rows"]
    ]
    widths = [max(len(line[i]) for line in table) for i in range(len(columns))]
    for line in table:
        out.write("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() + "\n")
    worst = max(
        (abs(row["z"]) for row in doc["rows"] if row["z"] is not None), default=None
    )
    if worst is not None:
        out.write(f"max |z|: {worst:.3f}\n")
    return out.getvalue()


def render(config: dict, rows: list[Row], fmt: str) -> str:
    """Render the report document in one of json, csv, human."""
    doc = {"config": config, "rows": [row.to_obj() for row in rows]}
    if fmt == "json":
        return _render_json(doc)
    if fmt == "csv":
        return _render_csv(doc)
    if fmt == "human":
        return _render_human(doc)
    raise ValueError(f"unknown format {fmt!r}")
