"""End-to-end runs of the gridcover command line."""

import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from gridcover.cli import main
from gridcover.report import CSV_HEADER, REPORT_SCHEMA

GOLDEN = Path(__file__).parent / "data" / "constants_golden.json"

# small but statistically meaningful argument sets, one per subcommand
FAST_ARGS = {
    "constants": ["constants", "--seed", "2"],
    "predict": ["predict", "--m", "2", "--ell", "1", "--d", "2", "--seed", "2"],
    "simulate": ["simulate", "--m", "2", "--ell", "2", "--d", "1",
                 "--samples", "20000", "--seed", "2"],
    "sweep": ["sweep", "--max-m", "2", "--max-d", "2",
              "--samples", "10000", "--seed", "2"],
    "verify": ["verify", "--max-d", "2", "--max-combined", "1",
               "--samples", "50000", "--seed", "2"],
    "index-bench": ["index-bench", "--n", "4000", "--L", "5",
                    "--queries", "40", "--m", "1", "--d", "1", "--seed", "2"],
    "diagnose": ["diagnose", "--samples", "20000", "--seed", "2"],
}


def run_json(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


class TestPredict:
    def test_single_cell_two_dims(self, capsys):
        rc, doc = run_json(["predict", "--m", "1", "--ell", "1", "--d", "2"], capsys)
        assert rc == 0
        (row,) = doc["rows"]
        assert row["value"] == "9/16"
        assert row["decimal"] == 0.5625
        assert row["method"] == "analytic"

    def test_union_of_two(self, capsys):
        rc, doc = run_json(["predict", "--m", "2", "--ell", "1", "--d", "1"], capsys)
        assert rc == 0
        assert doc["rows"][0]["value"] == "11/12"

    def test_threshold_above_count(self, capsys):
        rc, doc = run_json(["predict", "--m", "1", "--ell", "3", "--d", "1"], capsys)
        assert rc == 0
        # normalized to the 3-grid full-overlap model
        assert doc["rows"][0]["value"] == "15/32"
        assert doc["rows"][0]["m"] == 1 and doc["rows"][0]["ell"] == 3


class TestSimulate:
    def test_agrees_with_analytic(self, capsys):
        rc, doc = run_json(
            ["simulate", "--m", "2", "--ell", "2", "--d", "1",
             "--samples", "50000", "--seed", "1"],
            capsys,
        )
        assert rc == 0
        (row,) = doc["rows"]
        assert row["analytic"] == "7/12"
        assert abs(row["value"] - 7 / 12) <= 4 * row["stderr"]
        assert abs(row["z"]) <= 4

    def test_pointwise_flag(self, capsys):
        rc, doc = run_json(
            ["simulate", "--m", "2", "--ell", "1", "--d", "9", "--pointwise",
             "--samples", "500", "--points", "400", "--seed", "3"],
            capsys,
        )
        assert rc == 0
        assert doc["rows"][0]["method"] == "point-sample"
        assert doc["config"]["points"] == 400


class TestExitCodes:
    def test_domain_error_is_exit_two(self, capsys):
        rc = main(["predict", "--m", "0", "--ell", "1", "--d", "1"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_decomposition_limit_is_exit_two(self, capsys):
        rc = main(["simulate", "--m", "2", "--ell", "1", "--d", "9",
                   "--samples", "200", "--seed", "1"])
        assert rc == 2
        assert "estimate_pointwise" in capsys.readouterr().err

    def test_unknown_subcommand_raises_usage_error(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_verify_failure_would_exit_one(self, capsys):
        # healthy catalog: exit 0
        rc = main(["verify", "--max-d", "1", "--max-combined", "1",
                   "--samples", "20000", "--seed", "4"])
        assert rc == 0
        capsys.readouterr()

    def test_diagnose_requires_two_grids(self, capsys):
        rc = main(["diagnose", "--m", "1", "--samples", "200", "--seed", "1"])
        assert rc == 2
        capsys.readouterr()


class TestOutputFormats:
    def test_csv_header(self, capsys):
        rc = main(["predict", "--m", "1", "--ell", "1", "--d", "1",
                   "--format", "csv"])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        body = [ln for ln in lines if not ln.startswith("#")]
        assert body[0] == CSV_HEADER
        assert body[1].startswith("1,1,1,analytic,3/4,0.75")

    def test_human_format_mentions_worst_z(self, capsys):
        rc = main(["sweep", "--max-m", "1", "--max-d", "1", "--samples", "5000",
                   "--seed", "5", "--format", "human"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("config:")
        assert "max |z|" in out

    def test_out_writes_file_and_keeps_stdout_quiet(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        rc = main(["predict", "--m", "1", "--ell", "1", "--d", "1",
                   "--out", str(target)])
        assert rc == 0
        assert capsys.readouterr().out == ""
        doc = json.loads(target.read_text())
        assert doc["rows"][0]["value"] == "3/4"

    @pytest.mark.parametrize("name", sorted(FAST_ARGS))
    def test_json_validates_against_schema(self, name, tmp_path, capsys):
        target = tmp_path / f"{name}.json"
        rc = main(FAST_ARGS[name] + ["--out", str(target)])
        assert rc == 0
        capsys.readouterr()
        jsonschema.validate(json.loads(target.read_text()), REPORT_SCHEMA)


class TestDeterminism:
    @pytest.mark.parametrize("name", ["predict", "simulate", "index-bench"])
    def test_rerun_is_byte_identical(self, name, tmp_path, capsys):
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        assert main(FAST_ARGS[name] + ["--out", str(first)]) == 0
        assert main(FAST_ARGS[name] + ["--out", str(second)]) == 0
        capsys.readouterr()
        assert first.read_bytes() == second.read_bytes()


class TestConstantsGolden:
    def test_output_matches_golden_file(self, tmp_path, capsys):
        target = tmp_path / "constants.json"
        rc = main(["constants", "--seed", "0", "--out", str(target)])
        assert rc == 0
        capsys.readouterr()
        assert target.read_text() == GOLDEN.read_text()

    def test_golden_file_holds_the_published_values(self):
        # guard against regenerating the golden file from broken output
        doc = json.loads(GOLDEN.read_text())
        values = {
            (row["method"].removeprefix("exact:"), row["d"], row["m"]): row["value"]
            for row in doc["rows"]
        }
        assert values[("offset-product", 1, 0)] == "3/8"
        assert values[("offset-product", 2, 0)] == "9/64"
        assert values[("max-offset-plus-half", 2, 0)] == "5/24"
        assert values[("max-offset-plus-half", 3, 0)] == "7/64"
        assert values[("span-product", 1, 0)] == "1/8"
        assert values[("max-offset-span-combined", 1, 1)] == "3/64"
        assert Fraction(values[("offset-product", 6, 0)]) == Fraction(3, 8) ** 6


class TestDiagnose:
    def test_separates_the_two_readings(self, capsys):
        rc, doc = run_json(["diagnose", "--samples", "50000", "--seed", "8"], capsys)
        assert rc == 0
        rows = {r["method"]: r for r in doc["rows"]}
        assert rows["analytic:at-least-one"]["value"] == "31/32"
        assert rows["analytic:at-least-one-literal-final-term"]["value"] == "13/12"
        assert abs(rows["exact-volume"]["z"]) <= 4
        assert abs(rows["exact-volume-vs-literal"]["z"]) > 10
        combined = rows["monte-carlo:max-offset-span-combined(d=2,m=1)"]
        assert combined["z"] <= 1.0  # within reported tolerance of 5/192
        assert rows["monte-carlo:combined-vs-role-swapped"]["z"] > 10
