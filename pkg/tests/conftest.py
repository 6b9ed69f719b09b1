"""
Pytest configuration and shared fixtures for syncarena tests.
"""

import pytest

from syncarena.control import Variant
from syncarena.scenario import get_preset, preset_table2, variant_params


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "e2e: marks slow end-to-end runs (ride-through scripts, ROA soundness, sweeps)"
    )


@pytest.fixture
def preset():
    """Key-parameter preset with both lines in service."""
    return preset_table2()


@pytest.fixture
def gfm_preset():
    return get_preset("table2-gfm")


@pytest.fixture
def gfl_params(preset):
    """Normal-operation bundle of the PI PLL."""
    return variant_params(preset, Variant.PLL_ORIGINAL)


@pytest.fixture
def gfm_params(gfm_preset):
    """Normal-operation bundle of the stability-enhanced VSG."""
    return variant_params(gfm_preset, Variant.VSG_ENHANCED)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every SYNCARENA_* variable for the duration of a test."""
    for name in ("SYNCARENA_OUT", "SYNCARENA_JOBS", "SYNCARENA_DT", "SYNCARENA_DEBUG"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch
