"""
Tests for environment settings.
"""

import logging
import os
from pathlib import Path
from unittest.mock import patch

import pytest

from syncarena import settings


class TestDefaults:
    """Test behavior with no SYNCARENA_* variables."""

    def test_defaults(self, clean_env):
        assert settings.get_out_dir() == Path("syncarena-out")
        assert settings.get_jobs() == 1
        assert settings.get_dt() == 1e-4
        assert settings.debug_enabled() is False


class TestValues:
    """Test valid and invalid environment values."""

    def test_valid_values(self, clean_env):
        with patch.dict(os.environ, {"SYNCARENA_OUT": "/tmp/runs", "SYNCARENA_JOBS": "4",
                                     "SYNCARENA_DT": "5e-5"}):
            assert settings.get_out_dir() == Path("/tmp/runs")
            assert settings.get_jobs() == 4
            assert settings.get_dt() == 5e-5

    @pytest.mark.parametrize("value", ["true", "TRUE", "1", "yes"])
    def test_debug_flag(self, clean_env, value):
        with patch.dict(os.environ, {"SYNCARENA_DEBUG": value}):
            assert settings.debug_enabled()

    def test_debug_flag_off(self, clean_env):
        with patch.dict(os.environ, {"SYNCARENA_DEBUG": "off"}):
            assert not settings.debug_enabled()

    @pytest.mark.parametrize("value, message", [
        ("many", "Invalid SYNCARENA_JOBS value 'many'"),
        ("0", "must be at least 1"),
    ])
    def test_invalid_jobs_warns(self, clean_env, caplog, value, message):
        """Test an invalid worker count falls back to 1 with a warning."""
        with patch.dict(os.environ, {"SYNCARENA_JOBS": value}):
            with caplog.at_level(logging.WARNING, logger="syncarena.settings"):
                assert settings.get_jobs() == 1
        assert message in caplog.text

    @pytest.mark.parametrize("value", ["fast", "-1e-4", "inf", "0"])
    def test_invalid_dt_warns(self, clean_env, caplog, value):
        with patch.dict(os.environ, {"SYNCARENA_DT": value}):
            with caplog.at_level(logging.WARNING, logger="syncarena.settings"):
                assert settings.get_dt() == 1e-4
        assert "SYNCARENA_DT" in caplog.text

    def test_blank_out_dir(self, clean_env):
        with patch.dict(os.environ, {"SYNCARENA_OUT": "   "}):
            assert settings.get_out_dir() == Path("syncarena-out")


class TestDotenv:
    """Test .env loading."""

    def test_loads_without_overriding(self, clean_env, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("SYNCARENA_JOBS=3\nSYNCARENA_DT=2e-4\n")
        clean_env.setenv("SYNCARENA_DT", "1e-3")
        assert settings.load_env(str(env_file), force=True) is True
        try:
            assert settings.get_jobs() == 3
            assert settings.get_dt() == 1e-3
        finally:
            os.environ.pop("SYNCARENA_JOBS", None)

    def test_missing_file(self, tmp_path):
        assert settings.load_env(str(tmp_path / ".env"), force=True) is False

    def test_loaded_once(self, tmp_path):
        settings.load_env(str(tmp_path / ".env"), force=True)
        assert settings.load_env() is False
