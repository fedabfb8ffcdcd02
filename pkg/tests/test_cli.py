"""Command-line interface: exit codes, file outputs, error paths."""

import csv
import json

import pytest

from mocg import problems
from mocg.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestList:
    def test_csv_covers_registry(self, capsys):
        code, out, _ = run_cli(capsys, "list")
        assert code == 0
        rows = list(csv.reader(out.splitlines()))
        assert rows[0][:3] == ["name", "n", "m"]
        names = {r[0] for r in rows[1:]}
        assert {"EX1", "Hil1", "MOP5", "SLC2-2"} <= names

    def test_pretty_table(self, capsys):
        code, out, _ = run_cli(capsys, "list", "--pretty")
        assert code == 0
        assert "convex" in out.splitlines()[0]


class TestSolve:
    def test_converged_run_exits_zero_and_writes_trace(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "EX1", "--x0", "1.5,0.9", "--out-dir", str(tmp_path)
        )
        assert code == 0
        assert "status=converged" in out
        trace = tmp_path / "solve_EX1_tt-prp_seed0.csv"
        assert trace.exists()
        text = trace.read_text()
        assert text.startswith("# mocg ")
        assert "# status = converged" in text
        data_lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert data_lines[0].split(",")[:4] == ["k", "crit", "beta", "step"]
        assert len(data_lines) >= 2

    def test_iteration_cap_exits_one(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys,
            "solve", "EX1", "--x0", "1.5,0.9", "--max-iters", "1",
            "--out-dir", str(tmp_path),
        )
        assert code == 1
        assert "status=iteration_cap" in out

    def test_unknown_problem_exits_two_and_names_valid(self, capsys):
        code, _, err = run_cli(capsys, "solve", "not-a-problem")
        assert code == 2
        assert "EX1" in err

    def test_unknown_method_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "solve", "EX1", "--method", "bfgs")
        assert code == 2
        assert "method" in err

    def test_bad_x0_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "solve", "EX1", "--x0", "1.0")
        assert code == 2
        assert "components" in err

    def test_method_flag_selects_method(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys,
            "solve", "EX1", "--method", "sd", "--x0", "1.5,0.9",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "solve_EX1_sd_seed0.csv").exists()

    def test_config_file_sets_method(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"method": "sd", "max_iters": 50}))
        code, out, _ = run_cli(
            capsys,
            "solve", "EX1", "--x0", "1.5,0.9", "--config", str(cfg),
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "solve_EX1_sd_seed0.csv").exists()

    def test_malformed_config_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        code, _, err = run_cli(capsys, "solve", "EX1", "--config", str(cfg))
        assert code == 2
        assert "JSON" in err


class TestBench:
    def test_writes_metrics_and_manifest(self, tmp_path, capsys):
        code, out, err = run_cli(
            capsys,
            "bench", "--problem", "EX1", "--method", "sd", "--method", "tt-prp",
            "--starts", "5", "--out-dir", str(tmp_path),
        )
        assert code == 0, err
        metrics = (tmp_path / "metrics.csv").read_text()
        assert "EX1,sd" in metrics and "EX1,tt-prp" in metrics
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["problems"] == ["EX1"]
        assert manifest["starts_per_problem"] == 5

    def test_no_problems_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "bench")
        assert code == 2
        assert "problem" in err

    def test_validate_reports_two_term_descent_violations(self, tmp_path, capsys):
        # the uncorrected two-term update loses sufficient descent on EX1
        # for some starts, which the from-scratch recheck must surface
        code, out, err = run_cli(
            capsys,
            "bench", "--problem", "EX1", "--method", "prp+", "--starts", "5",
            "--validate", "--out-dir", str(tmp_path),
        )
        assert code == 1
        assert "invariant violation" in err
        assert "EX1/prp+" in err
        assert "sufficient descent" in err

    def test_clean_validate_passes(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys,
            "bench", "--problem", "EX1", "--method", "tt-prp", "--starts", "3",
            "--validate", "--out-dir", str(tmp_path),
        )
        assert code == 0, err


class TestProfile:
    def test_writes_breakpoint_file(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys,
            "profile", "--problem", "EX1", "--method", "sd", "--method", "tt-prp",
            "--starts", "4", "--out-dir", str(tmp_path),
        )
        assert code == 0
        text = (tmp_path / "profile_jac_evals.csv").read_text()
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert lines[0] == "method,measure,omega,rho"
        assert any(l.startswith("sd,jac_evals,1.0") for l in lines)

    def test_single_method_exits_two(self, capsys):
        code, _, err = run_cli(
            capsys, "profile", "--problem", "EX1", "--method", "sd", "--starts", "2"
        )
        assert code == 2
        assert "two methods" in err

    def test_wall_time_marked_platform_dependent(self, tmp_path, capsys):
        code, _, _ = run_cli(
            capsys,
            "profile", "--problem", "EX1", "--method", "sd", "--method", "tt-prp",
            "--starts", "2", "--measure", "wall_time", "--out-dir", str(tmp_path),
        )
        assert code == 0
        assert "platform_dependent" in (tmp_path / "profile_wall_time.csv").read_text()


class TestPareto:
    def test_defaults_to_three_term_method(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys,
            "pareto", "--problem", "EX1", "--starts", "3", "--out-dir", str(tmp_path),
        )
        assert code == 0
        text = (tmp_path / "pareto_EX1.csv").read_text()
        data = [l for l in text.splitlines() if not l.startswith("#")]
        assert all(l.startswith("tt-prp,") for l in data[1:])
        assert len(data) == 4

    def test_header_names_coordinates(self, tmp_path, capsys):
        run_cli(
            capsys,
            "pareto", "--problem", "EX1", "--starts", "1", "--out-dir", str(tmp_path),
        )
        header = [
            l for l in (tmp_path / "pareto_EX1.csv").read_text().splitlines()
            if not l.startswith("#")
        ][0]
        for col in ("x0_1", "xf_2", "f0_1", "ff_2"):
            assert col in header


class TestCheck:
    def test_filtered_battery_passes(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--filter", "qp")
        assert code == 0
        assert "PASS qp-oracle" in out

    def test_ex1_regression_listed(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--filter", "ex1")
        assert code == 0
        assert "ex1-regression" in out

    def test_unmatched_filter_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "check", "--filter", "zzz")
        assert code == 2
        assert "no checks match" in err

    def test_corrupted_problem_fails_battery(self, capsys, monkeypatch):
        original = problems._BUILDERS["Hil1"]

        def corrupted():
            p = original()
            true_jac = p.jacobian
            p.jacobian = lambda x: true_jac(x) + 0.05
            return p

        monkeypatch.setitem(problems._BUILDERS, "Hil1", corrupted)
        code, out, _ = run_cli(capsys, "check", "--filter", "jacobian:Hil1")
        assert code == 1
        assert "FAIL jacobian:Hil1" in out


class TestTopLevel:
    def test_version_flag(self, capsys):
        code, out, _ = run_cli(capsys, "--version")
        assert code == 0
        assert out.startswith("mocg ")

    def test_no_command_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 2
