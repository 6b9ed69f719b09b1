"""
E2E Test 2: Energy-function regions of attraction against simulation

Interior samples of the modified estimate must all resynchronize, the estimate
must shrink with inertia and the simulated basin must grow with damping.
"""

from dataclasses import replace

import numpy as np
import pytest

from syncarena.control import Variant
from syncarena.integrate import StepConfig
from syncarena.lyapunov import EnergyKind, energy_function
from syncarena.plant import Plant
from syncarena.scenario import get_preset, variant_params
from syncarena.stability import BasinGrid, basin_oracle, classify_block, estimate_roa

pytestmark = pytest.mark.e2e


def vsg_params(**gfm_changes):
    params = variant_params(get_preset("table2-gfm"), Variant.VSG_ORIGINAL)
    return replace(params, gfm=replace(params.gfm, **gfm_changes))


def test_modified_estimate_is_sound():
    """Test 200 random interior samples of the modified estimate all settle on the SEP."""
    plant = Plant(Variant.VSG_ORIGINAL)
    params = vsg_params(d=4000.0)
    f = energy_function(plant.equivalent_swing(params), EnergyKind.MODIFIED)
    est = estimate_roa(f, resolution=401)
    samples = est.sample_interior(f, 200, np.random.default_rng(7))
    verdicts = classify_block(plant, params, (), StepConfig(dt=1e-3, t_end=5.0),
                              samples[:, 0], samples[:, 1], plant.equilibria(params))
    assert len(verdicts) == 200
    assert list(verdicts).count("Stable") == 200


def test_estimate_shrinks_with_inertia():
    plant = Plant(Variant.VSG_ORIGINAL)
    areas = []
    for j in (150.0, 300.0, 600.0):
        sw = plant.equivalent_swing(vsg_params(j=j, d=4000.0))
        areas.append(estimate_roa(energy_function(sw), resolution=401).area)
    assert areas[0] > areas[1] > areas[2]


def test_basin_grows_with_governor_damping():
    """Test the stable area of the simulated basin grows across D + k_omega."""
    grid = BasinGrid(-2.5, 3.0, -80.0, 80.0, n_delta=31, n_delta_dot=31)
    areas = []
    for k_omega in (0.0, 2e3, 4e3):
        params = vsg_params(d=100.0 + k_omega)
        basin = basin_oracle(Variant.VSG_ORIGINAL, params, grid, StepConfig(dt=1e-3, t_end=5.0))
        areas.append(basin.stable_area)
    assert areas[0] < areas[1] < areas[2]
