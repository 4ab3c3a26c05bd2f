import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from semiref.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_flat_config,
)

SRC = str(Path(__file__).resolve().parents[1] / "src")


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestReflect:
    def test_single_point_sech2(self, capsys):
        code, out, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "1", "--a", "1",
                "--emin", "1", "--n", "1", "--methods", "closed",
            ],
            capsys,
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "energy,method,log_prob,prob,err_estimate"
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert fields[1] == "closed"
        assert float(fields[2]) == pytest.approx(-3.6806, abs=1e-4)

    def test_closed_vs_momentum_rows_agree(self, capsys):
        code, out, _ = run_cli(
            [
                "reflect", "--model", "inverse_ho", "--alpha", "1",
                "--emin", "0.1", "--emax", "2", "--n", "8",
                "--methods", "closed,momentum",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        by_energy = {}
        for energy, method, log_prob, _, _ in rows:
            by_energy.setdefault(energy, {})[method] = float(log_prob)
        assert len(by_energy) == 8
        for values in by_energy.values():
            assert abs(values["closed"] - values["momentum"]) <= 1e-8

    def test_csv_output_deterministic(self, tmp_path, capsys):
        args = [
            "reflect", "--model", "lorentzian", "--v0", "1", "--a", "1",
            "--emin", "0.5", "--emax", "2", "--n", "4", "--spacing", "log",
            "--methods", "momentum,closed,contour",
        ]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert main(args + ["--out", str(first)]) == EXIT_OK
        assert main(args + ["--out", str(second)]) == EXIT_OK
        capsys.readouterr()
        assert first.read_bytes() == second.read_bytes()

    def test_json_output_schema(self, tmp_path, capsys):
        out_path = tmp_path / "rows.json"
        code, _, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "1", "--a", "1",
                "--emin", "1", "--n", "1", "--methods", "closed,momentum",
                "--out", str(out_path),
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = json.loads(out_path.read_text())
        assert [row["method"] for row in rows] == ["closed", "momentum"]
        assert set(rows[0]) == {"energy", "method", "log_prob", "prob", "err_estimate"}
        assert rows[0]["log_prob"] == pytest.approx(-3.680604738, rel=1e-8)

    def test_methods_ordered_by_name(self, capsys):
        code, out, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "1", "--a", "1",
                "--emin", "1", "--n", "1", "--methods", "momentum,contour,closed",
            ],
            capsys,
        )
        assert code == EXIT_OK
        methods = [line.split(",")[1] for line in out.strip().splitlines()[1:]]
        assert methods == sorted(methods)

    def test_empty_methods_is_usage_error(self, capsys):
        code, _, err = run_cli(
            ["reflect", "--model", "sech2", "--emin", "1", "--methods", ""],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "method" in err

    def test_numerov_rejected_for_inverse_ho(self, capsys):
        code, _, err = run_cli(
            [
                "reflect", "--model", "inverse_ho", "--alpha", "1",
                "--emin", "1", "--methods", "numerov",
            ],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "numerov" in err

    def test_unknown_model_rejected(self, capsys):
        code, _, _ = run_cli(
            ["reflect", "--model", "square", "--emin", "1", "--methods", "closed"],
            capsys,
        )
        assert code == EXIT_USAGE

    def test_bad_grid_rejected(self, capsys):
        code, _, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--emin", "2", "--emax", "1",
                "--n", "5", "--methods", "closed",
            ],
            capsys,
        )
        assert code == EXIT_USAGE

    def test_numerov_row_near_wkb(self, capsys):
        code, out, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "10", "--a", "2",
                "--emin", "1", "--n", "1", "--methods", "numerov,closed",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        logs = {row[1]: float(row[2]) for row in rows}
        assert abs(logs["numerov"] - logs["closed"]) / abs(logs["closed"]) <= 0.10

    def test_coarse_quadrature_flags_rows(self, capsys):
        code, out, err = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "1", "--a", "1",
                "--emin", "1", "--n", "1", "--methods", "momentum",
                "--nodes", "8", "--levels", "1",
            ],
            capsys,
        )
        assert code == EXIT_NUMERICAL
        assert "warning" in err
        # flagged row still carries the best estimate
        fields = out.strip().splitlines()[1].split(",")
        assert float(fields[2]) == pytest.approx(-3.6806, abs=1e-3)


class TestFlaggedRows:
    def test_underflow_row_is_null_in_json(self, tmp_path, capsys):
        # exp(-2 pi E) underflows double precision near E = 118.
        out_path = tmp_path / "rows.json"
        code, _, err = run_cli(
            [
                "reflect", "--model", "inverse_ho", "--alpha", "1",
                "--emin", "200", "--n", "1", "--methods", "closed",
                "--out", str(out_path),
            ],
            capsys,
        )
        assert code == EXIT_NUMERICAL
        assert "warning" in err
        row = json.loads(out_path.read_text())[0]
        assert row["log_prob"] is None
        assert row["prob"] is None

    def test_nonconverged_row_is_strict_json(self, tmp_path, capsys):
        # A one-level quadrature leaves err_estimate infinite; the JSON
        # writer must still emit a strictly parseable document.
        out_path = tmp_path / "rows.json"
        code, _, _ = run_cli(
            [
                "reflect", "--model", "sech2", "--v0", "1", "--a", "1",
                "--emin", "1", "--n", "1", "--methods", "momentum",
                "--nodes", "8", "--levels", "1", "--out", str(out_path),
            ],
            capsys,
        )
        assert code == EXIT_NUMERICAL
        row = json.loads(out_path.read_text())[0]
        assert row["err_estimate"] is None
        assert row["log_prob"] == pytest.approx(-3.6806, abs=1e-3)

    def test_underflow_row_is_nan_in_csv(self, capsys):
        code, out, _ = run_cli(
            [
                "reflect", "--model", "inverse_ho", "--alpha", "1",
                "--emin", "200", "--n", "1", "--methods", "closed",
            ],
            capsys,
        )
        assert code == EXIT_NUMERICAL
        assert out.strip().splitlines()[1].split(",")[2] == "nan"


class TestLz:
    def test_linear_closed_form_grid(self, capsys):
        code, out, _ = run_cli(
            [
                "lz", "--profile", "linear", "--scale-min", "1",
                "--scale-max", "3", "--n", "3", "--eps", "1",
                "--methods", "closed",
            ],
            capsys,
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "scale,epsilon,method,log_prob,prob,err_estimate"
        logs = [float(line.split(",")[3]) for line in lines[1:]]
        for k, log in enumerate(logs, start=1):
            assert log == pytest.approx(-math.pi * k, rel=1e-12)

    def test_single_scale_adiabatic_matches_closed(self, capsys):
        code, out, _ = run_cli(
            [
                "lz", "--profile", "linear", "--T", "2", "--eps", "1",
                "--methods", "adiabatic,closed",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        assert {row[2] for row in rows} == {"adiabatic", "closed"}
        logs = {row[2]: float(row[3]) for row in rows}
        assert logs["adiabatic"] == pytest.approx(logs["closed"], rel=1e-10)

    def test_tdse_row_matches_closed(self, capsys):
        code, out, _ = run_cli(
            [
                "lz", "--profile", "linear", "--T", "2", "--eps", "1",
                "--methods", "tdse,closed", "--tdse-rtol", "1e-8",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        logs = {row[2]: float(row[3]) for row in rows}
        assert abs(logs["tdse"] - logs["closed"]) / abs(logs["closed"]) <= 0.05

    def test_multiple_couplings_row_order(self, capsys):
        code, out, _ = run_cli(
            [
                "lz", "--profile", "linear", "--scale-min", "1",
                "--scale-max", "2", "--n", "2", "--eps", "0.5,1",
                "--methods", "closed,adiabatic",
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        # grid index, then coupling, then method name
        key = [(float(r[0]), float(r[1]), r[2]) for r in rows]
        assert key == sorted(key)
        assert len(rows) == 8

    def test_tanh_strong_coupling_rejected(self, capsys):
        code, _, err = run_cli(
            [
                "lz", "--profile", "tanh", "--tau", "2", "--esat", "1",
                "--eps", "1.5", "--methods", "adiabatic",
            ],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "esat" in err

    def test_closed_restricted_to_linear(self, capsys):
        code, _, _ = run_cli(
            [
                "lz", "--profile", "tanh", "--tau", "2", "--esat", "1",
                "--eps", "0.3", "--methods", "closed",
            ],
            capsys,
        )
        assert code == EXIT_USAGE

    def test_missing_eps_rejected(self, capsys):
        code, _, _ = run_cli(
            ["lz", "--profile", "linear", "--T", "1", "--methods", "closed"],
            capsys,
        )
        assert code == EXIT_USAGE


class TestConfigFile:
    def test_parse_flat_config(self):
        text = '\n'.join(
            [
                "# comment",
                'model = "sech2"',
                "v0 = 2.5",
                "n = 4   # trailing comment",
                "log = true",
            ]
        )
        record = parse_flat_config(text)
        assert record == {"model": "sech2", "v0": 2.5, "n": 4, "log": True}

    def test_config_file_drives_run(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            'model = "sech2"\nv0 = 1\na = 1\nemin = 1\nn = 1\nmethods = "closed"\n'
        )
        code, out, _ = run_cli(["reflect", "--config", str(cfg)], capsys)
        assert code == EXIT_OK
        assert float(out.strip().splitlines()[1].split(",")[2]) == pytest.approx(
            -3.6806, abs=1e-4
        )

    def test_flag_overrides_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            'model = "inverse_ho"\nalpha = 4\nemin = 1\nn = 1\nmethods = "closed"\n'
        )
        code, out, _ = run_cli(
            ["reflect", "--config", str(cfg), "--alpha", "1"], capsys
        )
        assert code == EXIT_OK
        # alpha = 1 gives omega = 1, so log_prob = -2 pi (not -pi from alpha = 4)
        assert float(out.strip().splitlines()[1].split(",")[2]) == pytest.approx(
            -2 * math.pi, rel=1e-10
        )

    def test_missing_config_file(self, capsys):
        code, _, _ = run_cli(["reflect", "--config", "/nonexistent.toml"], capsys)
        assert code == EXIT_USAGE


class TestValidate:
    def test_default_build_passes(self, capsys):
        code, out, _ = run_cli(["validate"], capsys)
        assert code == EXIT_OK
        assert "FAIL" not in out
        assert out.count("PASS") >= 10

    def test_coarse_quadrature_fails(self, capsys):
        code, out, _ = run_cli(["validate", "--nodes", "8", "--levels", "1"], capsys)
        assert code == EXIT_NUMERICAL
        assert "FAIL quadrature_convergence" in out

    def test_halved_hbar_still_passes_scaling(self, capsys):
        code, out, _ = run_cli(["validate", "--hbar", "0.5"], capsys)
        assert code == EXIT_OK
        assert "PASS hbar_scaling" in out


def test_module_entry_point_smoke(tmp_path):
    out_path = tmp_path / "rows.csv"
    proc = subprocess.run(
        [
            sys.executable, "-m", "semiref", "reflect", "--model", "sech2",
            "--v0", "1", "--a", "1", "--emin", "1", "--n", "1",
            "--methods", "closed", "--out", str(out_path),
        ],
        capture_output=True,
        text=True,
        env={"PYTHONPATH": SRC, "PATH": "/usr/bin:/bin:/usr/local/bin"},
    )
    assert proc.returncode == 0, proc.stderr
    assert out_path.read_text().startswith("energy,method,log_prob")
