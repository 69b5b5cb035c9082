"""Command line entry point: schemas, determinism, exit codes, file IO."""

import csv
import json
from fractions import Fraction

import pytest

from qbclab import random_density, save_matrix_json, save_protocol, make_nonhiding
from qbclab.cli import main

REPORT_KEYS = {"command", "seed", "parameters", "results", "violations", "wall_time_ms"}


def run(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


class TestReports:
    def test_verify_lemma(self, tmp_path):
        code, report = run(["verify-lemma", "--trials", "5", "--seed", "11"], tmp_path)
        assert code == 0
        assert set(report) == REPORT_KEYS
        assert report["command"] == "verify-lemma"
        assert report["results"]["pairs"] == 15
        assert report["results"]["min_gap"] > 0.0
        assert report["violations"] == []

    def test_bound_with_curve(self, tmp_path):
        code, report = run(["bound", "--grid-step", "0.01"], tmp_path)
        assert code == 0
        assert report["results"]["t_star"] == pytest.approx(0.4785927, abs=1e-6)
        assert report["results"]["p_star"] == pytest.approx(0.7392964, abs=1e-6)
        with open(report["results"]["curve_csv"]) as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["t", "committer_lower_bound", "receiver_lower_bound"]
        assert len(rows) == 102  # header + 101 grid points
        assert float(rows[1][1]) == 1.0
        assert float(rows[-1][2]) == 1.0

    def test_appendix_opt(self, tmp_path):
        code, report = run(["appendix-opt", "--p", "0.5"], tmp_path)
        assert code == 0
        results = report["results"]
        assert results["analytic_value"] == pytest.approx(0.7285533905932737, abs=1e-12)
        assert results["in_regime"] is True
        assert results["split_flip"] == pytest.approx(0.25, abs=1e-4)
        assert results["escape_flip"] == pytest.approx(2.0 / 3.0, abs=1e-4)
        assert report["violations"] == []

    def test_wcf_compose_exact_fields(self, tmp_path):
        code, report = run(["wcf-compose", "--z", "0.75", "--k", "2"], tmp_path)
        assert code == 0
        results = report["results"]
        assert results["achieved"] == {"exact": "3/4", "value": 0.75}
        assert results["residual"] == 0.0
        assert results["levels"] == ["win_terminal", "win_terminal"]
        assert results["committer_cheat"] == {"exact": "3/4", "value": 0.75}

    def test_simulate_modes(self, tmp_path):
        for mode, key in [
            ("honest", "accept_0"),
            ("cheat-alice", "committer_value"),
            ("cheat-bob", "receiver_value"),
            ("baseline", "committer_value"),
            ("generic", "max_value"),
        ]:
            code, report = run(
                ["simulate", "--p", "0.4786", "--mode", mode], tmp_path, f"{mode}.json"
            )
            assert code == 0, mode
            assert key in report["results"], mode
            assert report["violations"] == []

    def test_cheat_alice_includes_attack_simulation_at_zero_eps(self, tmp_path):
        code, report = run(["simulate", "--p", "0.5", "--mode", "cheat-alice"], tmp_path)
        assert code == 0
        results = report["results"]
        assert results["simulated_average"] == pytest.approx(
            results["committer_value"], abs=1e-6
        )

    def test_baseline(self, tmp_path):
        code, report = run(["baseline"], tmp_path)
        assert code == 0
        assert report["results"]["receiver_value"] == pytest.approx(0.75, abs=1e-12)
        assert report["results"]["committer_value"] == pytest.approx(0.75, abs=2e-3)

    def test_generic_attack_random_trials(self, tmp_path):
        code, report = run(["generic-attack", "--trials", "10", "--seed", "3"], tmp_path)
        assert code == 0
        results = report["results"]
        assert results["min_max_value"] >= results["floor"]
        assert results["min_committer_value"] <= results["min_max_value"]

    def test_generic_attack_from_files(self, tmp_path):
        s0 = random_density(3, rank=2, seed=100)
        s1 = random_density(3, rank=3, seed=101)
        p0, p1 = tmp_path / "s0.json", tmp_path / "s1.json"
        save_matrix_json(p0, s0.matrix)
        save_matrix_json(p1, s1.matrix)
        code, report = run(
            ["generic-attack", "--sigma0", str(p0), "--sigma1", str(p1)], tmp_path
        )
        assert code == 0
        assert report["results"]["max_value"] >= report["results"]["floor"]

    def test_classical_audit_bundled(self, tmp_path):
        code, report = run(["classical-audit", "--protocol", "nonbinding"], tmp_path)
        assert code == 0
        results = report["results"]
        assert results["p_star_A"] == {"exact": "1/1", "value": 1.0}
        assert results["p_star_B"] == {"exact": "1/2", "value": 0.5}
        assert results["sum"] == {"exact": "3/2", "value": 1.5}

    def test_classical_audit_from_file(self, tmp_path):
        path = tmp_path / "table.json"
        save_protocol(make_nonhiding(), path)
        code, report = run(["classical-audit", "--protocol", str(path)], tmp_path)
        assert code == 0
        assert report["results"]["p_star_B"] == {"exact": "1/1", "value": 1.0}

    def test_stdout_when_no_out(self, capsys):
        code = main(["wcf-compose", "--z", "0.5", "--k", "1"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert set(report) == REPORT_KEYS


class TestDeterminism:
    def test_reports_identical_modulo_wall_time(self, tmp_path):
        runs = []
        for name in ("a.json", "b.json"):
            _, report = run(
                ["verify-lemma", "--trials", "8", "--seed", "42"], tmp_path, name
            )
            report.pop("wall_time_ms")
            runs.append(report)
        assert runs[0] == runs[1]

    def test_generic_attack_deterministic(self, tmp_path):
        runs = []
        for name in ("a.json", "b.json"):
            _, report = run(
                ["generic-attack", "--trials", "6", "--seed", "7"], tmp_path, name
            )
            report.pop("wall_time_ms")
            runs.append(report)
        assert runs[0] == runs[1]


class TestExitCodes:
    def test_violations_exit_one(self, tmp_path):
        # an impossibly tight derivative tolerance turns findings into violations
        out = tmp_path / "v.json"
        code = main(
            [
                "appendix-opt", "--p", "0.5",
                "--tol", "derivative_location=1e-12",
                "--out", str(out),
            ]
        )
        assert code == 1
        report = json.loads(out.read_text())
        assert report["violations"]
        assert {v["check"] for v in report["violations"]} <= {
            "split_derivative_flip",
            "escape_derivative_flip",
        }

    def test_cross_check_failure_exits_one(self, tmp_path):
        out = tmp_path / "c.json"
        code = main(
            [
                "generic-attack", "--sigma0", "x", "--sigma1", "y",
                "--out", str(out),
            ]
        )
        assert code == 2  # unreadable files are usage errors, not violations

    def test_usage_errors_exit_two(self, tmp_path, capsys):
        assert main(["simulate", "--p", "1.5", "--mode", "honest"]) == 2
        assert main(["classical-audit", "--protocol", "no_such_table"]) == 2
        assert main(["verify-lemma", "--tol", "not_a_knob=1"]) == 2
        assert main(["verify-lemma", "--tol", "chain_slack"]) == 2
        capsys.readouterr()

    def test_argparse_errors_propagate_their_code(self, capsys):
        assert main(["no-such-command"]) == 2
        assert main(["appendix-opt"]) == 2  # missing required --p
        capsys.readouterr()

    def test_mismatched_sigma_flags(self, capsys):
        assert main(["generic-attack", "--sigma0", "only.json"]) == 2
        capsys.readouterr()


class TestTolOverrides:
    def test_override_changes_behavior(self, tmp_path):
        # loosening the location tolerance silences the violation again
        out = tmp_path / "ok.json"
        code = main(
            [
                "appendix-opt", "--p", "0.5",
                "--tol", "derivative_location=0.5",
                "--out", str(out),
            ]
        )
        assert code == 0

    def test_seed_validation(self, capsys):
        assert main(["verify-lemma", "--seed", "-1"]) == 2
        assert main(["verify-lemma", "--seed", str(1 << 64)]) == 2
        capsys.readouterr()


class TestLogging:
    def test_log_level_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("QBC_LOG_LEVEL", "debug")
        out = tmp_path / "log.json"
        assert main(["wcf-compose", "--z", "0.5", "--k", "1", "--out", str(out)]) == 0
        capsys.readouterr()
