import csv
import subprocess
import sys

import numpy as np
import pytest

from fsav_nls import parse_config
from fsav_nls.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main
from fsav_nls.experiments import (
    build_problem,
    cmd_compare_cost,
    cmd_converge_space,
    cmd_converge_time,
    cmd_run,
)

SMALL_1D = "preset=ex4_1\nalpha=1.7\nn=64\n"


def read_csv(path):
    with open(path) as f:
        return list(csv.DictReader(f))


@pytest.fixture
def cfg_file(tmp_path):
    def write(text):
        path = tmp_path / "exp.cfg"
        path.write_text(text)
        return str(path)

    return write


class TestCmdRun:
    def test_conservation_csv(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.5\nstride=10")
        out = cmd_run(cfg, tmp_path)
        rows = read_csv(tmp_path / "conservation.csv")
        assert list(rows[0]) == ["step", "t", "H", "M", "RH", "RM", "w", "E"]
        assert [int(r["step"]) for r in rows] == [0, 10, 20, 30, 40, 50]
        assert max(float(r["RH"]) for r in rows) <= 1e-10
        assert float(rows[0]["RH"]) == 0.0 and float(rows[0]["RM"]) == 0.0
        # written values parse back exactly
        assert [float(r["H"]) for r in rows] == out.record.H
        assert [float(r["w"]) for r in rows] == out.record.w

    def test_snapshot_at_zero_matches_initial_data(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.1\nsnapshot_times=0,0.1\nraw_fields=1")
        cmd_run(cfg, tmp_path)
        prob = build_problem(cfg)
        rows = read_csv(tmp_path / "snapshot_0.csv")
        assert list(rows[0]) == ["x", "abs_u", "P", "Q"]
        np.testing.assert_array_equal([float(r["x"]) for r in rows], prob.grid.points())
        np.testing.assert_array_equal([float(r["P"]) for r in rows], prob.u0.real)
        np.testing.assert_array_equal([float(r["Q"]) for r in rows], prob.u0.imag)
        np.testing.assert_array_equal([float(r["abs_u"]) for r in rows], np.sqrt(prob.u0.real**2 + prob.u0.imag**2))
        assert (tmp_path / "snapshot_0.1.csv").exists()

    def test_snapshot_2d_columns(self, tmp_path):
        cfg = parse_config("preset=ex4_3_V1\nalpha=1.3\nn=16\nt_final=0.02\nsnapshot_times=0.02")
        cmd_run(cfg, tmp_path)
        rows = read_csv(tmp_path / "snapshot_0.02.csv")
        assert list(rows[0]) == ["x", "y", "abs_u"]
        assert len(rows) == 256
        # x varies fastest
        assert float(rows[1]["x"]) > float(rows[0]["x"]) and rows[1]["y"] == rows[0]["y"]

    def test_cnf_scheme_run(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.2\nscheme=cnf")
        out = cmd_run(cfg, tmp_path)
        rows = read_csv(tmp_path / "conservation.csv")
        assert rows[0]["w"] == "nan"
        assert out.record.max_rh() <= 1e-9
        assert out.record.max_rm() <= 1e-10

    def test_deterministic(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.3\nstride=5")
        cmd_run(cfg, tmp_path / "a")
        cmd_run(cfg, tmp_path / "b")
        assert (tmp_path / "a/conservation.csv").read_bytes() == (tmp_path / "b/conservation.csv").read_bytes()


class TestConvergence:
    def test_time_ladder(self, tmp_path):
        cfg = parse_config(SMALL_1D + "taus=0.02,0.01,0.005")
        table = cmd_converge_time(cfg, tmp_path)
        rows = read_csv(tmp_path / "orders_time.csv")
        assert list(rows[0]) == ["tau", "error", "order"]
        assert [float(r["tau"]) for r in rows] == [0.02, 0.01, 0.005]
        assert rows[0]["order"] == ""
        for o in table.numeric_orders():
            assert abs(o - 2) <= 0.1

    def test_linear_time_ladder_hits_floor(self, tmp_path):
        # constant data is an eigenmode with eigenvalue 0, so the linear
        # scheme reproduces it exactly at every tau
        cfg = parse_config("preset=ex4_1\nalpha=1.5\nn=16\nbeta=0\nc0=1\ninitial_condition=constant\ntaus=0.02,0.01")
        table = cmd_converge_time(cfg, tmp_path)
        assert max(table.errors) <= 1e-13
        assert table.orders[1] == "floor"
        assert read_csv(tmp_path / "orders_time.csv")[1]["order"] == "floor"

    def test_space_ladder_constant_data(self, tmp_path):
        cfg = parse_config("preset=ex4_1\nalpha=1.7\nns=8,16,32\ninitial_condition=constant\nt_final=0.1")
        table = cmd_converge_space(cfg, tmp_path)
        assert len(table.errors) == 3
        assert max(table.errors) <= 1e-13

    def test_space_ladder_decreases(self, tmp_path):
        cfg = parse_config("preset=ex4_1\nalpha=1.7\nns=32,64\ntau=0.001\nt_final=0.1")
        table = cmd_converge_space(cfg, tmp_path)
        rows = read_csv(tmp_path / "orders_space.csv")
        assert [r["N"] for r in rows] == ["32", "64"]
        assert table.errors[1] < table.errors[0] / 10


class TestCompareCost:
    def test_rows(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.2\ntaus=0.02")
        rows = cmd_compare_cost(cfg, tmp_path)
        csv_rows = read_csv(tmp_path / "cost.csv")
        assert list(csv_rows[0]) == ["scheme", "tau", "wall_s", "steps", "inner_iters", "status"]
        assert [r["scheme"] for r in csv_rows] == ["fsav", "cnf"]
        assert all(int(r["steps"]) == 10 for r in csv_rows)
        assert rows[1].inner_iterations >= 2 * rows[1].steps

    def test_linear_case_single_iteration(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.2\ntaus=0.02\nbeta=0\nc0=1")
        rows = cmd_compare_cost(cfg, tmp_path)
        assert rows[1].inner_iterations == rows[1].steps

    def test_no_convergence_row(self, tmp_path):
        cfg = parse_config(SMALL_1D + "t_final=0.2\ntaus=0.02\ncnf_max_iter=1\ncnf_tol=1e-15")
        rows = cmd_compare_cost(cfg, tmp_path)
        assert rows[0].status == "ok"
        assert rows[1].status == "no_convergence"
        assert read_csv(tmp_path / "cost.csv")[1]["status"] == "no_convergence"


class TestMain:
    def test_run_ok(self, cfg_file, tmp_path, capsys):
        path = cfg_file(SMALL_1D + "t_final=0.1")
        assert main(["run", "--config", path, "--out", str(tmp_path / "o"), "--check"]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out
        assert (tmp_path / "o/conservation.csv").exists()

    def test_threads_flag(self, cfg_file, tmp_path):
        path = cfg_file(SMALL_1D + "t_final=0.1")
        assert main(["run", "--config", path, "--out", str(tmp_path), "--threads", "2"]) == EXIT_OK

    def test_config_error(self, cfg_file, tmp_path, capsys):
        path = cfg_file("preset=ex4_1\ntau=0.01")
        assert main(["run", "--config", path, "--out", str(tmp_path)]) == EXIT_CONFIG
        assert "alpha" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "none.cfg")]) == EXIT_CONFIG

    def test_solver_error(self, cfg_file, tmp_path, capsys):
        # zero shift with a defocusing nonlinearity leaves E + C0 <= 0
        path = cfg_file(SMALL_1D + "beta=-1\nt_final=0.1")
        assert main(["run", "--config", path, "--out", str(tmp_path)]) == EXIT_SOLVER
        assert "c0" in capsys.readouterr().err

    def test_bad_ladder_is_config_error(self, cfg_file, tmp_path, capsys):
        path = cfg_file(SMALL_1D + "taus=0.02,0.004")
        assert main(["converge-time", "--config", path, "--out", str(tmp_path)]) == EXIT_CONFIG
        assert "halvings" in capsys.readouterr().err

    def test_check_failure(self, cfg_file, tmp_path):
        path = cfg_file(SMALL_1D + "taus=0.02,0.01\norder_target=3\norder_tol=0.1")
        assert main(["converge-time", "--config", path, "--out", str(tmp_path), "--check"]) == EXIT_CHECK

    def test_check_failure_without_flag_is_ok(self, cfg_file, tmp_path):
        path = cfg_file(SMALL_1D + "taus=0.02,0.01\norder_target=3")
        assert main(["converge-time", "--config", path, "--out", str(tmp_path)]) == EXIT_OK

    def test_console_script_entry(self, cfg_file, tmp_path):
        path = cfg_file(SMALL_1D + "t_final=0.05")
        proc = subprocess.run(
            [sys.executable, "-m", "fsav_nls.cli", "run", "--config", path, "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr

    def test_bad_command(self, cfg_file):
        with pytest.raises(SystemExit):
            main(["explode", "--config", cfg_file(SMALL_1D)])
