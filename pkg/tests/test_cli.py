import math

import pytest

from rpi_meter.cli import build_parser, fmt, load_config, main, merge_config
from rpi_meter.errors import NumericalError, UsageError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEmit:
    def test_empty_rows_give_header_only_csv(self):
        from rpi_meter.cli import emit_csv
        assert emit_csv(["a", "b"], []) == "a,b\n"

    def test_probe_csv_row(self, capsys):
        code, out, _ = run_cli(capsys, "probe", "--m", "1", "--tau", "1",
                               "--Omega", "2", "--Q", "1", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "delta_x,delta_F,delta_E_mech"
        assert lines[1] == "0.500000000,2.00000000,2.00000000"


class TestNumberFormat:
    def test_fixed_band(self):
        assert fmt(2.0) == "2.00000000"
        assert fmt(0.001) == "0.00100000000"
        assert fmt(9999.0) == "9999.00000"

    def test_scientific_band(self):
        assert fmt(10000.0) == "1.00000000e+04"
        assert fmt(0.0009) == "9.00000000e-04"
        assert fmt(-6.5e-14) == "-6.50000000e-14"

    def test_zero_and_ints(self):
        assert fmt(0.0) == "0.00000000"
        assert fmt(64) == "64"
        assert fmt(True) == "true"

    def test_round_trip_nine_digits(self):
        import numpy as np
        rng = np.random.default_rng(2)
        for x in 10.0 ** rng.uniform(-12, 12, size=500):
            printed = fmt(float(x))
            assert float(printed) == pytest.approx(x, rel=5e-9)


class TestParsing:
    def test_defaults_filled_in(self, capsys):
        code, out, err = run_cli(capsys, "limit", "--l", "1", "--tau", "1")
        assert code == 0
        assert "delta_E_abs=2.00000000" in out

    def test_negative_length_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "limit", "--l", "-1", "--tau", "1")
        assert code == 1
        assert "error:" in err

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--l", "1", "--tau", "1",
                               "--bogus", "3")
        assert code == 1

    def test_missing_required(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--l", "1")
        assert code == 1
        assert "--tau" in err

    def test_no_subcommand(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1

    def test_constraint_violation_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--l", "1", "--tau", "1",
                               "--delta-x", "5")
        assert code == 2
        assert "constraint violation" in err

    def test_numerical_failure_exit_code(self, capsys, monkeypatch):
        from rpi_meter.service import handlers

        def boom(req):
            raise NumericalError("synthetic failure")

        monkeypatch.setattr(handlers, "run_engine", boom)
        code, _, err = run_cli(capsys, "engine", "--l", "1", "--tau", "1")
        assert code == 3
        assert "numerical failure" in err


class TestConfigFile:
    def test_config_provides_values(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("l=1\ntau=1\n")
        code, out, _ = run_cli(capsys, "limit", "--config", str(cfg))
        assert code == 0
        assert "delta_E_abs=2.00000000" in out

    def test_flag_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("l=1\ntau=1\n")
        code, out, _ = run_cli(capsys, "limit", "--config", str(cfg),
                               "--tau", "137")
        assert code == 0
        assert "delta_E_abs=0.170871532" in out

    def test_malformed_line_reports_lineno(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("l=1\nthis is junk\n")
        with pytest.raises(UsageError, match="bad.cfg:2"):
            load_config(str(cfg))

    def test_bad_value_type(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("l=abc\ntau=1\n")
        code, _, err = run_cli(capsys, "limit", "--config", str(cfg))
        assert code == 1
        assert "expected float" in err

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("l=1\ntau=1\nwibble=3\n")
        code, _, err = run_cli(capsys, "limit", "--config", str(cfg))
        assert code == 1
        assert "wibble" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--config", "/nope/nothing.cfg")
        assert code == 1

    def test_empty_config_with_full_flags(self, capsys, tmp_path):
        cfg = tmp_path / "empty.cfg"
        cfg.write_text("# just a comment\n\n")
        code, out, _ = run_cli(capsys, "limit", "--config", str(cfg),
                               "--l", "1", "--tau", "1")
        assert code == 0

    def test_comments_and_dashed_keys(self, capsys, tmp_path):
        cfg = tmp_path / "map.cfg"
        cfg.write_text("# sweep window\nl-min=0.1\nl-max=10\n"
                       "tau-min=0.1\ntau-max=10\ngrid=2\n")
        code, out, _ = run_cli(capsys, "map", "--config", str(cfg))
        assert code == 0
        assert out.count("\n") == 5  # header + 4 rows


class TestOutputs:
    def test_regime_text_block(self, capsys):
        code, out, _ = run_cli(capsys, "regime", "--l", "1", "--tau", "1",
                               "--dE", "1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "l=1.00000000"
        assert "delta_min=2.00000000" in lines
        assert any(line.startswith("regime=") for line in lines)

    def test_regime_csv(self, capsys):
        code, out, _ = run_cli(capsys, "regime", "--l", "1", "--tau", "1",
                               "--dE", "1", "--format", "csv")
        lines = out.splitlines()
        assert lines[0].startswith("l,tau,four_volume,delta_E_out")
        assert len(lines) == 2

    def test_limit_csv_uses_map_header(self, capsys):
        code, out, _ = run_cli(capsys, "limit", "--l", "1", "--tau", "1",
                               "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "l,tau,rho,regime,delta_E_abs,Q_opt,lambda,subregions"
        assert len(lines) == 2

    def test_map_header_and_rows(self, capsys):
        code, out, _ = run_cli(capsys, "map", "--l-min", "0.1", "--l-max", "10",
                               "--tau-min", "0.1", "--tau-max", "10",
                               "--grid", "3")
        lines = out.splitlines()
        assert lines[0] == "l,tau,rho,regime,delta_E_abs,Q_opt,lambda,subregions"
        assert len(lines) == 10

    def test_probe_output(self, capsys):
        code, out, _ = run_cli(capsys, "probe", "--m", "1", "--tau", "1",
                               "--Omega", "2", "--Q", "1")
        assert "delta_x=0.500000000" in out
        assert "delta_F=2.00000000" in out

    def test_engine_summary_block(self, capsys):
        code, out, _ = run_cli(capsys, "engine", "--modes", "1", "--steps", "8",
                               "--l", "1", "--tau", "1", "--points", "9",
                               "--sweep", "5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "delta,variance,fit_C,fit_p"
        fit_line = [l for l in lines if l.startswith("# fit_C=")][0]
        assert float(fit_line.split("=")[1]) == pytest.approx(4.0, rel=1e-4)

    def test_sample_stats_only(self, capsys):
        code, out, _ = run_cli(capsys, "sample", "--l", "1", "--tau", "1",
                               "--dE", "1.41421356", "--n", "5000",
                               "--seed", "9", "--stats-only")
        assert code == 0
        assert out.startswith("n=5000")

    def test_sample_csv_with_footer(self, capsys):
        code, out, _ = run_cli(capsys, "sample", "--l", "1", "--tau", "1",
                               "--dE", "1", "--n", "2", "--seed", "9",
                               "--cells", "2")
        lines = out.splitlines()
        assert lines[0] == "sample,cell,Ex,Ey,Ez,Hx,Hy,Hz"
        assert len([l for l in lines if not l.startswith("#")]) == 5
        assert any(l.startswith("# per_component_sd=") for l in lines)

    def test_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "result.txt"
        code, out, _ = run_cli(capsys, "limit", "--l", "1", "--tau", "1",
                               "--out", str(out_path))
        assert code == 0
        assert out == ""
        assert "delta_E_abs=2.00000000" in out_path.read_text()

    def test_unwritable_out_path(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--l", "1", "--tau", "1",
                               "--out", "/nonexistent-dir/x.txt")
        assert code == 1

    def test_byte_identical_reruns(self, capsys):
        args = ("sample", "--l", "1", "--tau", "1", "--dE", "1", "--n", "200",
                "--seed", "77")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        args = ("map", "--l-min", "0.01", "--l-max", "100", "--tau-min", "0.1",
                "--tau-max", "10", "--grid", "7")
        _, m1, _ = run_cli(capsys, *args)
        _, m2, _ = run_cli(capsys, *args)
        assert m1 == m2

    def test_cgs_units_flag(self, capsys):
        code, out, _ = run_cli(capsys, "regime", "--l", "1", "--tau", "1",
                               "--dE", "1e-10", "--units", "cgs")
        assert code == 0
        line = [l for l in out.splitlines() if l.startswith("delta_min=")][0]
        assert float(line.split("=")[1]) == pytest.approx(6.4949e-14, rel=1e-4)


class TestMergeConfig:
    def test_global_keys_from_config(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("l=1\ntau=137\nformat=csv\n")
        parser = build_parser()
        args = parser.parse_args(["limit", "--config", str(cfg)])
        from rpi_meter.cli import SUBCOMMANDS
        merged = merge_config(args, SUBCOMMANDS["limit"])
        assert merged["format"] == "csv"
        assert merged["tau"] == 137.0
        assert merged["units"] == "natural"
