"""Command-line interface: report rendering, file inputs, and the
pass / mathematical-failure / input-error exit code contract."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

import slicecert.cli as cli

GOOD_SPACE = {
    "points": ["a", "b", "c"],
    "base": "a",
    "dist": [["0", "1", "2"], ["1", "0", "5/2"], ["2", "5/2", "0"]],
}
# Well-formed but violates the triangle inequality: d(a,c) > d(a,b) + d(b,c).
BROKEN_SPACE = {
    "points": ["a", "b", "c"],
    "base": "a",
    "dist": [["0", "1", "9"], ["1", "0", "1"], ["9", "1", "0"]],
}
GOOD_NORM = {
    "kind": "polyhedral",
    "cone_vertices": [["1", "0"], ["3/4", "1/2"], ["1/2", "3/4"], ["0", "1"]],
}


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestHappyPaths:
    def test_verify_single_suite(self, capsys):
        code, out, err = run_cli(capsys, "verify", "metric", "--samples", "10")
        assert code == 0 and err == ""
        report = json.loads(out)
        assert report["ok"] is True
        assert [r["suite"] for r in report["reports"]] == ["metric"]

    def test_verify_all_expands_in_order(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--samples", "2", "--seed", "1", "--depth", "2"
        )
        assert code == 0
        report = json.loads(out)
        assert [r["suite"] for r in report["reports"]] == [
            "metric",
            "freespace",
            "rtree",
            "absnorm",
            "dyadic",
        ]

    def test_example_reports(self, capsys):
        code, out, _ = run_cli(capsys, "example-a", "--level", "1")
        assert code == 0
        assert json.loads(out)["ok"] is True
        code, out, _ = run_cli(
            capsys, "example-b", "--level", "2", "--samples", "3"
        )
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_output_is_deterministic(self, capsys):
        args = ("verify", "metric", "--samples", "5", "--seed", "42")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second

    def test_no_floats_in_reports(self, capsys):
        _, out, _ = run_cli(capsys, "verify", "metric", "--samples", "5")
        for token in json.loads(out, parse_float=lambda s: pytest.fail(s)).values():
            pass


class TestRendering:
    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--format", "csv"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "field,value"
        assert any(line.startswith("command,") for line in lines)
        assert any(",true" in line for line in lines)

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--out", str(target)
        )
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["ok"] is True

    def test_unwritable_out_path_is_an_input_error(self, tmp_path, capsys):
        target = tmp_path / "missing" / "report.json"
        code, _, err = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--out", str(target)
        )
        assert code == 2
        assert "error:" in err


class TestFileInputs:
    def test_space_check_passes(self, tmp_path, capsys):
        path = tmp_path / "space.json"
        path.write_text(json.dumps(GOOD_SPACE))
        code, out, _ = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--space", str(path)
        )
        assert code == 0
        report = json.loads(out)
        assert report["space_check"]["ok"] is True

    def test_axiom_violation_is_a_mathematical_failure(self, tmp_path, capsys):
        path = tmp_path / "space.json"
        path.write_text(json.dumps(BROKEN_SPACE))
        code, out, _ = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--space", str(path)
        )
        assert code == 1
        report = json.loads(out)
        assert report["space_check"]["ok"] is False
        assert report["ok"] is False

    def test_malformed_space_is_an_input_error(self, tmp_path, capsys):
        path = tmp_path / "space.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "verify", "--space", str(path))
        assert code == 2 and "error:" in err
        path.write_text(json.dumps({"points": ["a"], "base": "a"}))
        code, _, err = run_cli(capsys, "verify", "--space", str(path))
        assert code == 2 and "error:" in err

    def test_missing_space_file_is_an_input_error(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "verify", "--space", str(tmp_path / "nope.json")
        )
        assert code == 2 and "error:" in err

    def test_norm_check_passes(self, tmp_path, capsys):
        path = tmp_path / "norm.json"
        path.write_text(json.dumps(GOOD_NORM))
        code, out, _ = run_cli(
            capsys, "verify", "metric", "--samples", "3", "--norm", str(path)
        )
        assert code == 0
        assert json.loads(out)["norm_check"]["ok"] is True

    def test_malformed_norm_is_an_input_error(self, tmp_path, capsys):
        path = tmp_path / "norm.json"
        path.write_text(json.dumps({"kind": "polyhedral"}))
        code, _, err = run_cli(capsys, "verify", "--norm", str(path))
        assert code == 2 and "error:" in err


class TestInputErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ("verify", "nosuch"),
            ("verify", "metric", "--samples", "0"),
            ("verify", "metric", "--depth", "9"),
            ("example-a", "--level", "7"),
            ("example-b", "--level", "1"),
            ("example-b", "--level", "4", "--samples", "0"),
        ],
    )
    def test_bad_values_exit_two(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == 2
        assert "error:" in err

    def test_unknown_format_is_rejected_by_the_parser(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "--format", "xml"])
        assert exc.value.code == 2

    def test_unknown_subcommand_is_rejected_by_the_parser(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2


class TestInstalledScript:
    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "slicecert.cli", "example-a", "--level", "1"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["ok"] is True
