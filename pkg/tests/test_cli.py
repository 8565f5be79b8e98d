"""CLI behavior: exit codes, stream discipline, parity with the library."""

from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from majdyn import ExperimentConfig, load_graph, run_experiment, write_report
from majdyn.cli import main
from majdyn.harness import _CSV_COLUMNS, report_to_dict


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestDispatch:
    def test_no_command_fails_with_usage(self, capsys):
        code, out, err = run_cli(capsys)
        assert code == 1
        assert out == ""
        assert "usage:" in err

    def test_unknown_command(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert "usage:" in err

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "run", "--n", "10", "--p", "0.1", "--frob")
        assert code == 1


class TestRun:
    def test_csv_stdout(self, capsys):
        code, out, err = run_cli(
            capsys, "run", "--n", "60", "--p", "0.1", "--trials", "3", "--seed", "1"
        )
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 3
        assert list(rows[0]) == list(_CSV_COLUMNS)
        assert {r["outcome"] for r in rows} <= {"unanimous", "period_two", "day_cap"}
        assert "unanimity fraction" in err  # summaries stay on stderr

    def test_json_stdout_matches_library(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "--n", "60", "--p", "0.1", "--trials", "3",
            "--seed", "1", "--format", "json",
        )
        assert code == 0
        expected = report_to_dict(
            run_experiment(ExperimentConfig(n=60, p=0.1, trials=3, master_seed=1))
        )
        assert json.loads(out) == expected

    def test_output_file_matches_write_report(self, capsys, tmp_path):
        cli_path = tmp_path / "cli.json"
        code, out, _ = run_cli(
            capsys, "run", "--n", "60", "--p", "0.1", "--trials", "3",
            "--seed", "1", "--format", "json", "-o", str(cli_path),
        )
        assert code == 0
        assert out == ""  # data went to the file, not stdout
        lib_path = tmp_path / "lib.json"
        report = run_experiment(ExperimentConfig(n=60, p=0.1, trials=3, master_seed=1))
        write_report(report, lib_path, "json")
        assert cli_path.read_bytes() == lib_path.read_bytes()

    def test_p_regime_flag(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "--n", "500", "--p-regime", "upper",
            "--p-coefficient", "0.5", "--trials", "2", "--format", "json",
        )
        assert code == 0
        data = json.loads(out)
        assert data["config"]["p_spec"]["exponent"] == -0.5

    def test_conflicting_density_flags(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "--n", "100", "--p", "0.1", "--p-regime", "upper"
        )
        assert code == 1
        assert "mutually exclusive" in err

    def test_missing_n(self, capsys):
        code, _, err = run_cli(capsys, "run", "--p", "0.1")
        assert code == 1
        assert "--n" in err

    def test_invalid_density(self, capsys):
        code, _, err = run_cli(capsys, "run", "--n", "10", "--p", "1.5")
        assert code == 1
        assert "error" in err

    def test_quiet_silences_stderr(self, capsys):
        code, out, err = run_cli(
            capsys, "run", "--n", "60", "--p", "0.1", "--trials", "2",
            "--seed", "1", "-q",
        )
        assert code == 0
        assert err == ""
        assert len(parse_csv(out)) == 2


class TestConfigFile:
    def test_config_file_with_override(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n": 60, "p": 0.1, "trials": 2, "master_seed": 1}))
        code, out, _ = run_cli(
            capsys, "run", "--config", str(path), "--trials", "4"
        )
        assert code == 0
        assert len(parse_csv(out)) == 4  # flag beats the file

    def test_unknown_key_rejected(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n": 60, "p": 0.1, "trails": 2}))
        code, _, err = run_cli(capsys, "run", "--config", str(path))
        assert code == 1
        assert "trails" in err

    def test_missing_config_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "run", "--config", str(tmp_path / "nope.json"))
        assert code == 1


class TestSweep:
    def test_d_values(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--n", "100", "--p", "0.1", "--trials", "5",
            "--seed", "2", "--d-values", "0,10,100",
        )
        assert code == 0
        rows = parse_csv(out)
        assert [r["d"] for r in rows] == ["0", "10", "100"]
        assert float(rows[-1]["unanimity_fraction"]) == 1.0

    def test_p_values(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--n", "100", "--trials", "4", "--seed", "2",
            "--p-values", "0.05,0.2",
        )
        assert code == 0
        rows = parse_csv(out)
        assert [r["p"] for r in rows] == ["0.05", "0.2"]

    def test_requires_exactly_one_grid(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--n", "100", "--p", "0.1")
        assert code == 1
        code, _, err = run_cli(
            capsys, "sweep", "--n", "100", "--p", "0.1",
            "--d-values", "0", "--p-values", "0.1",
        )
        assert code == 1


class TestExperimentCommands:
    def test_census(self, capsys):
        code, out, _ = run_cli(
            capsys, "census", "--n", "200", "--p", "0.1", "--trials", "4",
            "--seed", "3", "--gamma", "0.1", "--c", "1.0",
        )
        assert code == 0
        rows = parse_csv(out)
        keys = [r["key"] for r in rows]
        assert "alpha_hat_q50" in keys and "positive_excess_fraction" in keys

    def test_census_requires_gamma(self, capsys):
        code, _, err = run_cli(
            capsys, "census", "--n", "200", "--p", "0.1", "--trials", "2"
        )
        assert code == 1
        assert "gamma" in err

    def test_growth(self, capsys):
        code, out, _ = run_cli(
            capsys, "growth", "--n", "200", "--p", "0.1", "--trials", "5", "--seed", "4"
        )
        assert code == 0
        rows = parse_csv(out)
        assert [r["day"] for r in rows] == ["0", "1", "2"]

    def test_contraction_explicit_floor(self, capsys):
        code, out, err = run_cli(
            capsys, "contraction", "--n", "300", "--p", "0.1", "--trials", "5",
            "--seed", "5", "--bias-floor", "10",
        )
        assert code == 0
        assert "qualifying trials" in err
        for row in parse_csv(out):
            assert float(row["minority_share_next"]) >= 0.0

    def test_contraction_auto_floor(self, capsys):
        code, _, err = run_cli(
            capsys, "contraction", "--n", "300", "--p", "0.2", "--trials", "3",
            "--seed", "5",
        )
        assert code == 0
        assert "auto bias floor" in err

    def test_gen_graph_round_trip(self, capsys, tmp_path):
        path = tmp_path / "g.bin"
        code, _, err = run_cli(
            capsys, "gen-graph", "--n", "500", "--p", "0.05", "--seed", "9",
            "-o", str(path),
        )
        assert code == 0
        g = load_graph(path)
        assert g.n == 500
        assert f"edges={g.edge_count}" in err
        g.validate()

    def test_gen_graph_requires_output(self, capsys):
        code, _, _ = run_cli(capsys, "gen-graph", "--n", "10", "--p", "0.1")
        assert code == 1


class TestVerifyLemmas:
    def test_small_sweep_passes(self, capsys):
        code, out, err = run_cli(capsys, "verify-lemmas", "--max-trials", "25")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 8
        assert all(r["result"] == "PASS" for r in rows)
        assert "checks passed" in err

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify-lemmas", "--max-trials", "10", "--format", "json"
        )
        assert code == 0
        data = json.loads(out)
        assert {r["check"] for r in data["rows"]} == {
            "chernoff-tails", "psi-contraction", "psi-pair-lower-bound",
            "binom-shift", "equality-prob", "coupling-sandwich",
            "four-rv", "berry-esseen",
        }


class TestFailurePaths:
    def test_unwritable_output_is_runtime_failure(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "run", "--n", "40", "--p", "0.1", "--trials", "1",
            "-o", str(tmp_path / "no_dir" / "x.csv"),
        )
        assert code == 2
        assert "no_dir" in err


def test_installed_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "majdyn.cli", "run", "--n", "40", "--p", "0.1",
         "--trials", "2", "--seed", "0"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 3
