import json

import numpy as np
import pytest

from darkpath.cli import main
from darkpath.gates import diagonal_program, named_gate
from darkpath.serialize import (
    read_json,
    read_program_json,
    read_sweep_csv,
    read_trajectory_csv,
    write_json,
    write_matrix_json,
    write_program_json,
)


class TestGateCommand:
    def test_named_gate_reports_distance(self, capsys):
        assert main(["gate", "--name", "Z3"]) == 0
        out = capsys.readouterr().out
        assert "gate_distance" in out
        distance = float(out.split("=")[-1])
        assert distance < 1e-4

    def test_identity_program_distance_zero(self, tmp_path, capsys):
        program = diagonal_program(np.zeros(2), eta=4.0)
        prog_path = tmp_path / "identity.json"
        write_program_json(program, prog_path)
        assert main(["gate", "--program", str(prog_path)]) == 0
        distance = float(capsys.readouterr().out.split("=")[-1])
        assert distance < 1e-6

    def test_unknown_name_exits_2(self, capsys):
        assert main(["gate", "--name", "nosuch"]) == 2
        err = capsys.readouterr().err
        assert "X3" in err and "Z3" in err and "T3" in err and "H3" in err

    def test_requires_exactly_one_source(self, capsys):
        assert main(["gate"]) == 2
        assert main(["gate", "--name", "Z3", "--program", "x.json"]) == 2

    def test_json_output(self, tmp_path):
        out = tmp_path / "gate.json"
        assert main(["gate", "--name", "Z3", "--out", str(out), "--format", "json"]) == 0
        doc = read_json(out)
        assert "analytic" in doc and "simulated" in doc and doc["distance"] < 1e-4


class TestSweepCommand:
    def test_single_point_grid(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--gates", "Z3", "--etas", "4.0", "--samples", "1",
             "--grid", "0", "--out", str(out), "--no-plot"]
        )
        assert code == 0
        result = read_sweep_csv(out)
        assert len(result) == 1
        assert result.rows[0].mean_fidelity == pytest.approx(1.0, abs=1e-4)

    def test_row_count_and_figure(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--gates", "Z3", "T3", "--etas", "0", "4", "--samples", "2",
             "--grid", "0.05", "--points", "3", "--out", str(out)]
        )
        assert code == 0
        assert len(read_sweep_csv(out)) == 2 * 2 * 3
        assert (tmp_path / "sweep.png").exists()

    def test_threads_flag(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--gates", "Z3", "--etas", "4.0", "--samples", "2",
             "--grid", "0.05", "--points", "3", "--threads", "2",
             "--out", str(out), "--no-plot"]
        )
        assert code == 0
        assert len(read_sweep_csv(out)) == 3

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "sweep.json"
        write_json(config, {"gates": ["Z3"], "etas": [4.0], "samples": 2,
                            "delta_half_width": 0.02, "delta_points": 3})
        out = tmp_path / "out.csv"
        code = main(["sweep", "--config", str(config), "--samples", "1",
                     "--out", str(out), "--no-plot"])
        assert code == 0
        result = read_sweep_csv(out)
        assert all(r.samples == 1 for r in result.rows)  # flag beat the file

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        config = tmp_path / "bad.json"
        config.write_text('{"gates": [,]}')
        assert main(["sweep", "--config", str(config)]) == 2
        err = capsys.readouterr().err
        assert ":" in err  # line-anchored message

    def test_json_output(self, tmp_path):
        out = tmp_path / "sweep_out.json"
        code = main(["sweep", "--gates", "Z3", "--etas", "4.0", "--samples", "1",
                     "--grid", "0", "--out", str(out), "--format", "json", "--no-plot"])
        assert code == 0
        doc = read_json(out)
        assert len(doc["rows"]) == 1


class TestTraceCommand:
    def test_uniform_state_h3(self, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["trace", "--name", "H3", "--state", "uniform3",
                     "--points", "60", "--out", str(out)])
        assert code == 0
        table = read_trajectory_csv(out)
        assert table["pop_computational"][-1] == pytest.approx(1.0, abs=1e-3)
        assert (tmp_path / "trace.png").exists()

    def test_component_state(self, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["trace", "--name", "X3", "--state", "0,1,1",
                     "--points", "40", "--out", str(out), "--no-plot"])
        assert code == 0
        table = read_trajectory_csv(out)
        assert table["pop_computational"][-1] == pytest.approx(1.0, abs=1e-3)

    def test_zero_state_exits_2(self):
        assert main(["trace", "--name", "X3", "--state", "0,0,0"]) == 2
        assert main(["trace", "--name", "X3", "--state", ""]) == 2

    def test_wrong_length_exits_2(self):
        assert main(["trace", "--name", "X3", "--state", "1,0"]) == 2


class TestSolveCommand:
    def test_diagonal_closed_form(self, tmp_path, capsys):
        target = np.diag([1.0, np.exp(0.4j), np.exp(-1.1j)])
        target_path = tmp_path / "diag.json"
        write_matrix_json(target, target_path)
        out = tmp_path / "prog.json"
        code = main(["solve", "--target", str(target_path), "--loops", "1",
                     "--out", str(out)])
        assert code == 0
        doc = read_json(out)
        assert doc["success"] is True
        assert doc["distance"] < 1e-12

    def test_h3_target_search(self, tmp_path):
        target, _ = named_gate("H3")
        target_path = tmp_path / "h3.json"
        write_matrix_json(target, target_path)
        out = tmp_path / "prog.json"
        code = main(["solve", "--target", str(target_path), "--loops", "2",
                     "--tol", "1e-6", "--seed", "1", "--out", str(out)])
        assert code == 0
        program = read_program_json(out)
        from darkpath.gates import compose
        from darkpath.levels import gate_distance

        assert gate_distance(compose(program), target) < 1e-6

    def test_infeasible_budget_exits_1_but_writes(self, tmp_path):
        from darkpath.gates import random_target

        target_path = tmp_path / "t.json"
        write_matrix_json(random_target(3, seed=3), target_path)
        out = tmp_path / "best.json"
        code = main(["solve", "--target", str(target_path), "--loops", "1",
                     "--tol", "1e-14", "--restarts", "1", "--out", str(out)])
        assert code == 1
        doc = read_json(out)
        assert doc["success"] is False
        assert np.isfinite(doc["distance"])

    def test_missing_target_exits_2(self):
        assert main(["solve"]) == 2
        assert main(["solve", "--target", "/nonexistent.json"]) == 2


class TestTwoQuditCommand:
    def test_z3_block_report(self, tmp_path, capsys):
        out = tmp_path / "cond.json"
        code = main(["two-qudit", "--name", "Z3", "--out", str(out), "--format", "json"])
        assert code == 0
        doc = read_json(out)
        assert doc["off_block_max"] < 1e-4
        assert doc["block_distance"] < 1e-4

    def test_identity_program(self, tmp_path, capsys):
        program = diagonal_program(np.zeros(2), eta=4.0)
        prog_path = tmp_path / "id.json"
        write_program_json(program, prog_path)
        assert main(["two-qudit", "--program", str(prog_path)]) == 0
        report = capsys.readouterr().out
        assert "identity" in report

    def test_laser_dimension_mismatch_exits_2(self, tmp_path):
        from darkpath.twoqudit import LaserConfig

        laser = LaserConfig(
            omega0=1.0, omegas=np.ones(9, dtype=complex), omega_a=1.0,
            eta_L=0.1, nu=1.0, Delta=10.0,
        )  # d = 4
        laser_path = tmp_path / "laser.json"
        write_json(laser_path, laser.to_json_dict())
        assert main(["two-qudit", "--name", "Z3", "--laser", str(laser_path)]) == 2

    def test_laser_report(self, tmp_path, capsys):
        from darkpath.twoqudit import LaserConfig

        laser = LaserConfig(
            omega0=1.0, omegas=np.ones(5, dtype=complex), omega_a=1.0,
            eta_L=0.1, nu=1.0, Delta=10.0,
        )
        laser_path = tmp_path / "laser.json"
        write_json(laser_path, laser.to_json_dict())
        assert main(["two-qudit", "--name", "Z3", "--laser", str(laser_path)]) == 0
        out = capsys.readouterr().out
        assert "kappa" in out and "laser drives: 7" in out


class TestParserBasics:
    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["gate", "--format", "xml"])
        assert exc.value.code == 2

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DARKPATH_THREADS", "1")
        out = tmp_path / "s.csv"
        assert main(["sweep", "--gates", "Z3", "--etas", "4.0", "--samples", "1",
                     "--grid", "0", "--out", str(out), "--no-plot"]) == 0
