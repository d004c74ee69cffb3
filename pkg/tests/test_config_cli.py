"""Configuration files and the command-line interface."""

import math

import numpy as np
import pytest

from granupore.cli import main
from granupore.config import (
    ConfigError,
    load_parameters,
    parse_angle,
    read_kv_file,
    read_symbol_config,
)


class TestKVFile:
    def test_roundtrip(self, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text(
            "# glass beads\nrho_s = 2600\nd = 1.5e-4\n\ndelta = 30 deg  # friction\n"
        )
        mat, gas = load_parameters(cfg)
        assert mat.rho_s == 2600.0 and mat.d == 1.5e-4
        assert mat.delta == pytest.approx(math.radians(30))
        assert gas.p_atm == 1.013e5  # default fills the gap

    def test_gas_keys(self, tmp_path):
        cfg = tmp_path / "g.cfg"
        cfg.write_text("eta_f = 2e-5\np_atm = 9e4\n")
        _, gas = load_parameters(cfg)
        assert gas.eta_f == 2e-5 and gas.p_atm == 9e4

    def test_unknown_key_line_number(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("rho_s = 2500\nviscosity = 1\n")
        with pytest.raises(ConfigError, match=r"bad\.cfg:2"):
            load_parameters(cfg)

    def test_bad_number_line_number(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("rho_s = heavy\n")
        with pytest.raises(ConfigError, match=r"bad\.cfg:1"):
            load_parameters(cfg)

    def test_duplicate_key(self, tmp_path):
        cfg = tmp_path / "dup.cfg"
        cfg.write_text("d = 1e-4\nd = 2e-4\n")
        with pytest.raises(ConfigError, match="duplicate"):
            read_kv_file(cfg)

    def test_missing_equals(self, tmp_path):
        cfg = tmp_path / "noeq.cfg"
        cfg.write_text("rho_s 2500\n")
        with pytest.raises(ConfigError, match=r"noeq\.cfg:1"):
            read_kv_file(cfg)

    def test_invalid_combination_reported(self, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text("mu1 = 0.9\n")  # violates mu1 < mu2
        with pytest.raises(ConfigError, match="mu1"):
            load_parameters(cfg)

    def test_parse_angle(self):
        assert parse_angle("0.5") == 0.5
        assert parse_angle("0.5 rad") == 0.5
        assert parse_angle("30 deg") == pytest.approx(math.radians(30))
        with pytest.raises(ConfigError):
            parse_angle("30 degrees")


class TestSymbolConfig:
    def test_parse(self, tmp_path):
        cfg = tmp_path / "sym.cfg"
        cfg.write_text("n_matrix = 2 0; 0 3\nxi = 3 0\nmomentum_rows = 0\nc = 1.0\n")
        data = read_symbol_config(cfg)
        np.testing.assert_allclose(data["N"], [[2.0, 0.0], [0.0, 3.0]])
        np.testing.assert_allclose(data["xi"], [3.0, 0.0])
        assert data["momentum_rows"] == (0,) and data["c"] == 1.0

    def test_missing_key(self, tmp_path):
        cfg = tmp_path / "sym.cfg"
        cfg.write_text("n_matrix = 1\nxi = 1\nc = 1\n")
        with pytest.raises(ConfigError, match="missing"):
            read_symbol_config(cfg)


class TestCliTable1:
    def test_values(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        assert main(["table1", "--out", str(out)]) == 0
        rows = [
            line.split(",")
            for line in out.read_text().splitlines()
            if line and not line.startswith("#")
        ]
        header, body = rows[0], rows[1:]
        f_closed = {float(r[0]): float(r[header.index("f_closed")]) for r in body}
        assert f_closed[0.0] == pytest.approx(0.5, abs=1e-12)
        assert f_closed[1.0] == pytest.approx(0.1875, abs=1e-12)
        assert f_closed[2.0] == 0.0
        diffs = [float(r[header.index("abs_diff")]) for r in body]
        assert max(diffs) < 1e-8


class TestCliCheckClassify:
    GRID = "phi=0.42:0.58:4,I=0.05:5:5:log,p=100:1000:2"

    def test_check_dp_passes(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main(["check", "--model", "dp", "--grid", self.GRID, "--out", str(out)])
        assert code == 0
        assert "pass" in capsys.readouterr().out
        text = out.read_text()
        assert text.splitlines()[0].startswith("#")  # provenance block
        assert "phi,I,p," in text

    def test_check_negative_control_fails(self, capsys):
        code = main(
            [
                "check", "--model", "roux-radjai", "--z-override", "dp",
                "--rr-gain", "1.0", "--grid", self.GRID,
            ]
        )
        assert code == 2
        assert "FAIL" in capsys.readouterr().out

    def test_classify_dp(self, capsys):
        assert main(["classify", "--model", "dp", "--grid", self.GRID]) == 0
        assert "certified-stable" in capsys.readouterr().out

    def test_classify_small_angle_fails_full_range(self, capsys):
        code = main(
            ["classify", "--model", "mui-psi", "--grid", "I=1e-2:10:8:log"]
        )
        assert code == 2
        assert "conditions-violated" in capsys.readouterr().out

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert (
                main(["check", "--model", "mui", "--grid", self.GRID, "--out", str(path)])
                == 0
            )
        assert a.read_bytes() == b.read_bytes()

    def test_derive(self, capsys):
        code = main(
            ["derive", "--model", "mui", "--grid", "phi=0.45:0.55:3,I=0.1:2:4:log,p=100:200:2"]
        )
        assert code == 0
        assert "max |closed - derived|" in capsys.readouterr().out


class TestCliSimulate:
    def test_box_reaches_equilibrium(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = main(
            [
                "simulate-box", "--model", "mui", "--I", "2.0", "--phi0", "0.55",
                "--t-end", "0.005", "--dt", "1e-6", "--out", str(out),
            ]
        )
        assert code == 0
        final = float(
            capsys.readouterr().out.splitlines()[0].split("=")[1]
        )
        assert final == pytest.approx(0.2, abs=1e-3)
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "t,phi,pf,div_u,I,i_eq"
        assert len(lines) > 10

    def test_box_random_forcing(self, capsys):
        code = main(
            [
                "simulate-box", "--model", "dp", "--forcing", "random", "--seed", "5",
                "--phi0", "0.5", "--t-end", "0.008", "--dt", "2e-6",
            ]
        )
        assert code == 0
        assert "bound violations: 0" in capsys.readouterr().out

    def test_column(self, tmp_path, capsys):
        out = tmp_path / "col.csv"
        code = main(
            [
                "simulate-column", "--cells", "50", "--t-end", "1e-3",
                "--out", str(out),
            ]
        )
        assert code == 0
        text = capsys.readouterr().out
        assert "energy non-increasing: yes" in text
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "t,z,pf"

    def test_column_implicit(self, capsys):
        code = main(
            [
                "simulate-column", "--cells", "40", "--t-end", "1e-3",
                "--dt", "5e-5", "--mode", "implicit",
            ]
        )
        assert code == 0

    def test_box_scenario_file(self, tmp_path, capsys):
        scenario = tmp_path / "run.cfg"
        scenario.write_text(
            "phi0 = 0.55\nI = 2.0\nt_end = 0.005\ndt = 1e-6\n"
        )
        code = main(["simulate-box", "--model", "mui", "--scenario", str(scenario)])
        assert code == 0
        final = float(capsys.readouterr().out.splitlines()[0].split("=")[1])
        assert final == pytest.approx(0.2, abs=1e-3)

    def test_scenario_flag_precedence_and_unknown_key(self, tmp_path, capsys):
        scenario = tmp_path / "run.cfg"
        scenario.write_text("cells = 30\nt_end = 1e-3\nramp = 2\n")
        code = main(["simulate-column", "--scenario", str(scenario)])
        assert code == 1  # unknown key 'ramp' reported
        assert "run.cfg:3" in capsys.readouterr().err
        scenario.write_text("cells = 30\nt_end = 1e-3\n")
        code = main(
            ["simulate-column", "--scenario", str(scenario), "--cells", "25"]
        )
        assert code == 0
        assert "steps:" in capsys.readouterr().out


class TestCliSymbol:
    def test_minimal_example(self, tmp_path, capsys):
        cfg = tmp_path / "sym.cfg"
        cfg.write_text("n_matrix = 2\nxi = 3 0\nmomentum_rows = 0\nc = 1\n")
        out = tmp_path / "eigs.csv"
        assert main(["symbol", "--config", str(cfg), "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "spectral union holds: yes" in stdout
        assert "9.0" in stdout  # added eigenvalue c |xi|^2
        assert "M,9.0000000000e+00,0.0000000000e+00" in out.read_text()


def test_scenario_defaults_match_parser():
    from granupore.cli import BOX_DEFAULTS, COLUMN_DEFAULTS, build_parser

    parser = build_parser()
    box = parser.parse_args(["simulate-box", "--model", "dp"])
    for key, value in BOX_DEFAULTS.items():
        assert getattr(box, key) == value, key
    col = parser.parse_args(["simulate-column"])
    for key, value in COLUMN_DEFAULTS.items():
        assert getattr(col, key) == value, key


class TestCliErrors:
    def test_bad_config_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("nonsense = 1\n")
        code = main(["check", "--model", "dp", "--config", str(cfg)])
        assert code == 1
        assert "bad.cfg:1" in capsys.readouterr().err

    def test_unknown_model_exit_1(self, capsys):
        assert main(["check", "--model", "bingham"]) == 1

    def test_usage_error_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["check"])  # --model is required
        assert exc.value.code == 1

    def test_bad_grid_exit_1(self, capsys):
        assert main(["check", "--model", "dp", "--grid", "phi=1:2"]) == 1
