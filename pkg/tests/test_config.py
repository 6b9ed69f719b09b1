"""
Tests for scenario and preset config files.
"""

import textwrap
from dataclasses import replace
from typing import Optional

import pytest

from syncarena.config import (
    convert_value,
    dump_preset,
    dump_scenario,
    format_value,
    load_preset,
    load_scenario,
    parse_document,
    parse_preset,
    parse_scenario,
    save_scenario,
)
from syncarena.control import Variant
from syncarena.errors import ConfigError
from syncarena.integrate import StepConfig
from syncarena.models import SwingState
from syncarena.scenario import PRESET_NAMES, fault_scenario, get_preset, variant_params


def cfg(text):
    return textwrap.dedent(text).lstrip("\n")


class TestValues:
    """Test token conversion."""

    def test_convert(self):
        assert convert_value("0.45", float) == 0.45
        assert convert_value(" 3 ", int) == 3
        assert convert_value("Yes", bool) is True
        assert convert_value("none", Optional[float]) is None
        assert convert_value("pll-original", str) == "pll-original"

    def test_none_needs_optional(self):
        with pytest.raises(ValueError, match="none"):
            convert_value("none", float)

    def test_bad_bool(self):
        with pytest.raises(ValueError, match="true or false"):
            convert_value("maybe", bool)

    def test_format(self):
        assert format_value(0.1 + 0.2) == "0.30000000000000004"
        assert format_value(False) == "false"
        assert format_value(None) == "none"
        assert format_value(Variant.VSG_ENHANCED) == "vsg-enhanced"


class TestDocument:
    """Test sectioning and diagnostics."""

    def test_comments_and_sections(self):
        doc = parse_document(cfg("""
            # header comment
            [Grid]
            x_g = 0.7   # one line out

            [events]
            t=1 set v_g=0.5
        """))
        assert doc.has("grid")
        assert doc.entries["grid"][0].value == "0.7"
        assert doc.events[0].line == 6

    @pytest.mark.parametrize("text, line, message", [
        ("[bogus]\n", 1, "unknown section"),
        ("x_g = 0.45\n", 1, "outside of any"),
        ("[grid]\nx_g 0.45\n", 2, "key = value"),
        ("[grid]\nx_g = 0.45\nx_g = 0.5\n", 3, "duplicate key"),
    ])
    def test_structure_errors(self, text, line, message):
        with pytest.raises(ConfigError, match=message) as exc_info:
            parse_document(text, "case.cfg")
        assert exc_info.value.line == line
        assert str(exc_info.value).startswith(f"case.cfg:{line}: ")


class TestPresetFiles:
    """Test preset dump/parse."""

    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_round_trip(self, name):
        """Test parse_preset(dump_preset(p)) reproduces every float bit for bit."""
        preset = get_preset(name)
        assert parse_preset(dump_preset(preset)) == preset

    def test_defaults_for_missing_fields(self):
        preset = parse_preset("[gfm]\nj = 150.0\n")
        assert preset.name == "custom"
        assert preset.gfm.j == 150.0
        assert preset.gfm.d == 100.0

    def test_scenario_sections_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_preset("[events]\nt=1 set v_g=0.5\n")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "single.cfg"
        path.write_text(dump_preset(get_preset("table2-single")))
        assert load_preset(str(path)).grid.x_g == pytest.approx(0.7)


class TestScenarioFiles:
    """Test scenario dump/parse."""

    def test_round_trip(self, preset):
        """Test a dumped ride-through scenario parses back equal."""
        spec = fault_scenario(preset, "pll-frozen", kind="line-trip", t_fault=1.0, t_clear=1.5,
                              t_end=2.0, dt=1e-3)
        spec = replace(spec, init=SwingState(0.1, -0.25))
        parsed = parse_scenario(dump_scenario(spec, preset.base))
        assert parsed.scenario == spec
        assert parsed.base == preset.base
        assert [ev.label for ev in parsed.scenario.events] == ["fault", "clear"]

    def test_save_and_load(self, tmp_path, gfm_preset):
        spec = fault_scenario(gfm_preset, "vsg-enhanced", t_fault=1.0, t_clear=1.2, t_end=2.0)
        path = tmp_path / "vsg.cfg"
        save_scenario(spec, str(path))
        assert load_scenario(str(path)).scenario == spec

    def test_fault_shorthand(self):
        """Test [fault] timeline keys build the ride-through events."""
        loaded = parse_scenario(cfg("""
            [scenario]
            preset = table2
            variant = pll-original
            [fault]
            t_fault = 1.0
            t_clear = 1.5
            [solver]
            dt = 0.001
            t_end = 2.0
        """))
        spec = loaded.scenario
        assert spec.variant is Variant.PLL_ORIGINAL
        assert [ev.t for ev in spec.events] == [1.0, 1.5]
        assert spec.events[0].changes["grid.v_g"] == 0.02
        assert spec.cfg == StepConfig(dt=0.001, t_end=2.0)
        assert spec.verdict_from == 1.0

    def test_overrides_on_preset(self):
        loaded = parse_scenario(cfg("""
            [scenario]
            preset = table2-gfm
            init = 0.3, 0.0
            [gfm]
            j = 150.0
            [fault]
            v_g = 0.3
            t_fault = 1.0
        """), defaults=StepConfig(dt=1e-3, t_end=2.0))
        spec = loaded.scenario
        assert spec.variant is Variant.VSG_ENHANCED
        assert spec.params.gfm.j == 150.0
        assert loaded.preset.gfm.j == 150.0
        assert spec.init == SwingState(0.3, 0.0)
        assert spec.cfg.dt == 1e-3
        assert loaded.preset.fault_v_g == 0.3
        assert spec.events[0].changes == {"grid.v_g": 0.3}

    def test_variant_override_reshapes_params(self):
        """Test an outside variant shapes the parameters and keeps the file's own overrides."""
        text = cfg("""
            [scenario]
            preset = table2-gfm
            variant = vsg-original
            [gfm]
            j = 150.0
        """)
        as_written = parse_scenario(text).scenario
        overridden = parse_scenario(text, variant="vsg-enhanced").scenario
        enhanced = variant_params(get_preset("table2-gfm"), Variant.VSG_ENHANCED).gfm

        assert as_written.params.gfm.k_omega == 0.0
        assert overridden.variant is Variant.VSG_ENHANCED
        assert enhanced.k_omega > 0.0
        assert overridden.params.gfm.k_omega == enhanced.k_omega
        assert overridden.params.gfm.d == enhanced.d
        assert overridden.params.gfm.j == 150.0

    def test_explicit_events(self):
        spec = parse_scenario(cfg("""
            [scenario]
            variant = vsg-original
            [solver]
            t_end = 1.0
            [events]
            t=0.5 label=dip set v_g=0.2, pem=0.5
        """)).scenario
        (ev,) = spec.events
        assert ev.t == 0.5
        assert ev.label == "dip"
        assert ev.changes == {"v_g": 0.2, "pem": 0.5}

    @pytest.mark.parametrize("text, line, message", [
        ("[grid]\nfoo = 1\n", 2, "unknown key 'foo'"),
        ("[grid]\nx_g = abc\n", 2, "bad value for grid.x_g"),
        ("[grid]\nx_g = -1.0\n", 1, "invalid \\[grid\\]"),
        ("[events]\nt=1 sets v_g=0.5\n", 2, "expected 't=<s>"),
        ("[events]\nt=1 set bogus=1\n", 2, "bad event"),
        ("[scenario]\nvariant = pll-magic\n", 1, "unknown controller variant"),
        ("[scenario]\ninit = 1 2 3\n", 1, "bad init"),
        ("[fault]\nt_clear = 2.0\n", 1, "needs t_fault"),
        ("[fault]\nt_fault = 1.0\n[events]\nt=1 set v_g=0.5\n", 3, "not both"),
    ])
    def test_errors_carry_line(self, text, line, message):
        with pytest.raises(ConfigError, match=message) as exc_info:
            parse_scenario(text, "s.cfg")
        assert exc_info.value.line == line
        assert exc_info.value.path == "s.cfg"

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nope.cfg"
        with pytest.raises(ConfigError, match="cannot read config file") as exc_info:
            load_scenario(str(missing))
        assert exc_info.value.path == str(missing)
