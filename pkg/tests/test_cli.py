"""
Tests for the command-line front end and its exit codes.
"""

import pytest

from syncarena.cli import EXIT_ERROR, EXIT_OK, VARIANT_NAMES, main
from syncarena.export import read_summary
from syncarena.scenario import PRESET_NAMES


def emitted(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


class TestParser:
    """Test argument handling without running an analysis."""

    def test_no_command(self, capsys):
        assert main([]) == EXIT_ERROR
        assert "usage" in capsys.readouterr().err

    def test_help_lists_variants(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["--help"])
        assert exc_info.value.code == 0
        out = capsys.readouterr().out
        for name in VARIANT_NAMES:
            assert name in out

    def test_help_epilog_keeps_one_variant_per_line(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        lines = [line.strip() for line in capsys.readouterr().out.splitlines()]
        for name in VARIANT_NAMES:
            assert name in lines

    def test_unknown_preset_is_usage_error(self, capsys):
        assert main(["sim", "--preset", "ieee39"]) == EXIT_ERROR
        err = capsys.readouterr().err
        assert "usage" in err
        assert "error: " in err

    def test_bad_number_is_usage_error(self, capsys):
        assert main(["sim", "--preset", "table2-gfm", "--dt", "abc"]) == EXIT_ERROR
        assert "--dt" in capsys.readouterr().err


class TestInfoCommands:
    def test_presets(self, capsys):
        assert main(["presets"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in PRESET_NAMES:
            assert f"\n{name}\n" in f"\n{out}"

    def test_preset_dump(self, capsys):
        assert main(["presets", "--preset", "table2-gfm"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "[gfm]" in out
        assert "j = 300.0" in out

    def test_analogy(self, capsys):
        assert main(["analogy", "--preset", "table2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "inverse proportion to damping" in out
        assert "Preset table2" in out


class TestErrors:
    """Test error paths map to exit code 1."""

    def test_missing_config(self, tmp_path, capsys):
        missing = tmp_path / "absent.cfg"
        assert main(["sim", "--config", str(missing), "--out", str(tmp_path)]) == EXIT_ERROR
        err = capsys.readouterr().err
        assert err.startswith("error: ")
        assert str(missing) in err

    def test_bad_config_line(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("[grid]\nx_g = abc\n")
        assert main(["sim", "--config", str(path), "--out", str(tmp_path)]) == EXIT_ERROR
        assert f"{path}:2:" in capsys.readouterr().err

    def test_gfl_fault_without_equilibrium(self, tmp_path, capsys):
        """Test the deep PLL dip reports the missing fault equilibrium."""
        code = main(["eac", "--preset", "table2", "--variant", "pll-original",
                     "--out", str(tmp_path)])
        assert code == EXIT_ERROR
        assert "no stable equilibrium" in capsys.readouterr().err

    def test_half_basin_range(self, tmp_path, capsys):
        code = main(["basin", "--preset", "table2-gfm", "--variant", "vsg-original",
                     "--delta-range", "0", "1", "--out", str(tmp_path)])
        assert code == EXIT_ERROR
        assert "must be given together" in capsys.readouterr().err


class TestAnalysisCommands:
    """Test short runs of the analysis commands and their artifacts."""

    def test_steady_sim(self, tmp_path, clean_env, capsys):
        code = main(["sim", "--preset", "table2-gfm", "--steady", "--t-end", "0.5",
                     "--dt", "1e-3", "--out", str(tmp_path)])
        assert code == EXIT_OK
        summary = read_summary(tmp_path / "summary-vsg-enhanced.txt")
        assert summary["overall"] == "Stable"
        assert summary["exit_code"] == "0"
        assert summary["lost_sync"] == "false"
        header = (tmp_path / "trajectory-vsg-enhanced.csv").read_text().splitlines()[0]
        assert header.startswith("t,delta,delta_dot")
        assert emitted(capsys.readouterr().out)["overall"] == "Stable"

    def test_eac_without_disturbance(self, tmp_path, capsys):
        """Test a no-change fault leaves the whole decelerating area and is always stable."""
        code = main(["eac", "--preset", "table2-gfm", "--variant", "vsg-original", "--depth", "1.0",
                     "--dt", "1e-3", "--out", str(tmp_path)])
        assert code == EXIT_OK
        values = emitted(capsys.readouterr().out)
        assert float(values["margin"]) == pytest.approx(float(values["s_minus"]), rel=1e-9)
        assert values["stable"] == "true"
        assert values["critical_note"].startswith("AlwaysStable")
        assert (tmp_path / "eac-vsg-original.txt").exists()

    def test_gfl_eac_on_shallow_dip(self, tmp_path, capsys):
        code = main(["eac", "--preset", "table2", "--variant", "pll-original", "--depth", "0.2",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        values = emitted(capsys.readouterr().out)
        assert float(values["margin"]) > 0.0

    def test_roa(self, tmp_path, capsys):
        code = main(["roa", "--preset", "table2-gfm", "--variant", "vsg-original",
                     "--resolution", "101", "--out", str(tmp_path)])
        assert code == EXIT_OK
        values = emitted(capsys.readouterr().out)
        assert float(values["modified_area"]) < float(values["classic_area"])
        assert (tmp_path / "roa-classic-vsg-original.csv").exists()
        assert (tmp_path / "roa-modified-vsg-original.csv").exists()
        assert read_summary(tmp_path / "roa-vsg-original.txt")["variant"] == "vsg-original"

    def test_sweep(self, tmp_path, capsys):
        code = main(["sweep", "--preset", "table2-gfm", "--variant", "vsg-original",
                     "--axis", "clear_time=0.05,0.1", "--t-fault", "0.2", "--t-end", "0.5",
                     "--dt", "1e-3", "--jobs", "1", "--out", str(tmp_path)])
        assert code == EXIT_OK
        lines = (tmp_path / "sweep-vsg-original.csv").read_text().splitlines()
        assert lines[0].startswith("clear_time,")
        assert len(lines) == 3
        assert emitted(capsys.readouterr().out)["errors"] == "0"

    def test_variant_flag_reshapes_config_params(self, tmp_path, capsys):
        """Test --variant on a config runs the flag's variant with its own parameters."""
        path = tmp_path / "steady.cfg"
        path.write_text("[scenario]\npreset = table2-gfm\nvariant = vsg-original\n\n"
                        "[gfm]\nj = 150.0\n\n[solver]\ndt = 0.001\nt_end = 0.5\n")
        code = main(["sim", "--config", str(path), "--variant", "vsg-enhanced",
                     "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / "summary-vsg-enhanced.txt").exists()
        assert not (tmp_path / "summary-vsg-original.txt").exists()
        assert emitted(capsys.readouterr().out)["variant"] == "vsg-enhanced"

