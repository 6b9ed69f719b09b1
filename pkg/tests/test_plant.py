"""
Tests for the controller-variant plants and parameter overwrites.
"""

import math

import numpy as np
import pytest

from syncarena.control import Variant
from syncarena.errors import ParameterError
from syncarena.models import SwingState
from syncarena.plant import Plant, PlantParams, apply_changes, resolve_key


class TestResolveKey:
    """Test overwrite key resolution."""

    def test_qualified(self):
        assert resolve_key("grid.v_g") == ("grid", "v_g")

    def test_bare_field(self):
        """Test a bare field name is looked up across the sections."""
        assert resolve_key("k_omega") == ("gfm", "k_omega")
        assert resolve_key(" i_q ") == ("current", "i_q")

    def test_bundle_flags(self):
        assert resolve_key("pll_frozen") == (None, "pll_frozen")
        assert resolve_key("pem") == (None, "pem")

    def test_unknown_section(self):
        with pytest.raises(ParameterError, match="unknown parameter section"):
            resolve_key("bus.v_g")

    def test_unknown_field(self):
        with pytest.raises(ParameterError, match="unknown parameter 'bogus'"):
            resolve_key("bogus")


class TestApplyChanges:
    """Test bundle overwrites."""

    def test_grouped_replacement(self):
        """Test fields of one section are replaced together."""
        params = apply_changes(PlantParams(), {"grid.v_g": 0.2, "i_d": 0.0, "i_q": -1.0,
                                               "pll_frozen": True})
        assert params.grid.v_g == 0.2
        assert (params.current.i_d, params.current.i_q) == (0.0, -1.0)
        assert params.pll_frozen is True
        assert params.gfl == PlantParams().gfl

    def test_original_untouched(self):
        base = PlantParams()
        apply_changes(base, {"x_g": 0.7})
        assert base.grid.x_g == 0.45

    def test_missing_field_in_section(self):
        with pytest.raises(ParameterError, match="grid has no field 'k_p'"):
            apply_changes(PlantParams(), {"grid.k_p": 1.0})

    def test_invalid_value_rejected(self):
        """Test the replaced section is validated."""
        with pytest.raises(ParameterError, match="exceeds i_rated"):
            apply_changes(PlantParams(), {"i_q": -1.0})


class TestPlant:
    """Test state vectors and right-hand sides of the variants."""

    def test_unknown_variant(self):
        with pytest.raises(ParameterError):
            Plant("vsg-turbo")

    def test_pll_phase_point_round_trip(self):
        """Test the integrator state reproduces the requested phase-plane point."""
        plant = Plant("pll-original")
        params = PlantParams()
        y = plant.initial_vector(params, SwingState(0.8, 3.0))
        s = plant.swing_state(params, y)
        assert s.delta == pytest.approx(0.8)
        assert s.delta_dot == pytest.approx(3.0, rel=1e-12)

    def test_vsg_state_is_phase_point(self):
        plant = Plant(Variant.VSG_ORIGINAL)
        y = plant.initial_vector(PlantParams(), SwingState(0.3, -2.0))
        np.testing.assert_array_equal(y, [0.3, -2.0])

    def test_first_order_state_is_angle(self):
        """Test first-order variants carry the angle only and derive the rate."""
        plant = Plant("vsg-first-order")
        params = PlantParams()
        y = plant.initial_vector(params, SwingState(0.3, 99.0))
        assert y.shape == (1,)
        s = plant.swing_state(params, y)
        gfm, grid = params.gfm, params.grid
        pem = grid.v_pcc * grid.v_g / grid.x_g
        assert s.delta_dot == pytest.approx((gfm.p_0 - pem * math.sin(0.3)) / gfm.d)

    def test_frozen_pll_stands_still(self):
        """Test the frozen PLL holds both states while pll_frozen is set."""
        plant = Plant("pll-frozen")
        params = apply_changes(PlantParams(), {"pll_frozen": True})
        y = plant.initial_vector(params, SwingState(0.5, 1.0))
        np.testing.assert_array_equal(plant.rhs(params, y), [0.0, 0.0])

    def test_block_matches_single_states(self):
        """Test stacked states evaluate like single ones."""
        plant = Plant("vsg-enhanced")
        params = PlantParams()
        deltas, rates = np.array([0.1, 0.5]), np.array([0.2, -0.3])
        block = plant.rhs(params, plant.initial_block(params, deltas, rates))
        for i in range(2):
            single = plant.rhs(params, plant.initial_vector(params, SwingState(deltas[i], rates[i])))
            np.testing.assert_allclose(block[:, i], single)

    def test_gfl_equilibria(self):
        """Test the PLL equilibrium sits at asin(x_g*i_d) on a stiff grid."""
        eq = Plant("pll-original").equilibria(PlantParams())
        assert eq.sep == pytest.approx(math.asin(0.45))
        assert eq.uep == pytest.approx(math.pi - math.asin(0.45))

    def test_observe_marks_missing_quantities(self):
        """Test quantities a variant lacks are NaN."""
        params = PlantParams()
        obs = Plant("vsg-original").observe(params, np.array([0.3, 0.0]))
        assert obs[3] == params.gfm.j
        assert math.isnan(obs[2]) and math.isnan(obs[4]) and math.isnan(obs[5])
        obs = Plant("vsg-first-order").observe(params, np.array([0.3]))
        assert math.isnan(obs[3])

    def test_window_energy_zero_at_sep(self):
        plant = Plant("pll-original")
        params = PlantParams()
        f = plant.window_energy(params)
        eq = plant.equilibria(params)
        y = plant.initial_vector(params, SwingState(eq.sep, 0.0))
        assert plant.observe(params, y, f)[5] == pytest.approx(0.0, abs=1e-12)
