"""
Tests for fixed-step integration, event handling and synchronization verdicts.
"""

import math

import numpy as np
import pytest

from syncarena.errors import NonFiniteState, ParameterError
from syncarena.integrate import (
    StepConfig,
    TimedEvent,
    Trajectory,
    VerdictKind,
    detect_drift,
    detect_loss_of_sync,
    discrete_delta_step,
    march,
    rk4_step,
    simulate,
    window_verdicts,
)
from syncarena.models import SwingState
from syncarena.plant import Plant, PlantParams, apply_changes


def make_trajectory(t, delta, delta_dot):
    """Trajectory with only the phase-plane columns filled."""
    t = np.asarray(t, dtype=float)
    nan = np.full_like(t, np.nan)
    return Trajectory(t, np.asarray(delta, dtype=float), np.asarray(delta_dot, dtype=float),
                      nan, nan, nan, nan)


SEP = math.asin(0.45)
UEP = math.pi - SEP


class TestStepConfig:
    """Test step configuration validation."""

    def test_n_steps(self):
        assert StepConfig(dt=1e-4, t_end=0.5).n_steps == 5000

    @pytest.mark.parametrize("kwargs, message", [
        ({"dt": 0.0}, "dt must be positive"),
        ({"dt": float("nan")}, "dt must be positive"),
        ({"dt": 0.1, "t_end": 0.05}, "t_end must be at least dt"),
        ({"record_every": 0}, "record_every"),
        ({"record_every": 2.0}, "record_every"),
    ])
    def test_invalid(self, kwargs, message):
        with pytest.raises(ParameterError, match=message):
            StepConfig(**kwargs)

    def test_negative_event_time(self):
        with pytest.raises(ParameterError, match="event time"):
            TimedEvent(-1.0, {"v_g": 0.5})


class TestRk4:
    """Test the Runge-Kutta step."""

    @staticmethod
    def _oscillate(dt, t_end):
        y = np.array([1.0, 0.0])
        for _ in range(int(round(t_end / dt))):
            y = rk4_step(lambda s: np.array([s[1], -s[0]]), y, dt)
        return y

    def _oscillator_error(self, dt):
        return abs(self._oscillate(dt, 2.0)[0] - math.cos(2.0))

    def test_fourth_order(self):
        """Test each halving of the step cuts the global error by about 16."""
        errors = [self._oscillator_error(dt) for dt in (0.2, 0.1, 0.05)]
        for coarse, fine in zip(errors, errors[1:]):
            assert coarse / fine >= 12.0
            assert 3.9 <= math.log2(coarse / fine) <= 4.2
        assert errors[1] < 1e-5

    def test_one_period_is_closed(self):
        """Test a full period at a thousand steps returns to the start."""
        y = self._oscillate(2.0 * math.pi / 1000, 2.0 * math.pi)
        np.testing.assert_allclose(y, [1.0, 0.0], rtol=0.0, atol=1e-9)

    def test_non_finite_reports_time(self):
        """Test a diverging step raises with its timestamp."""
        with pytest.raises(NonFiniteState) as exc_info:
            rk4_step(lambda s: s * np.inf, np.array([1.0]), 0.1, t=0.3)
        assert exc_info.value.t == 0.3
        assert "t=0.300000" in str(exc_info.value)

    def test_unchecked_step_passes_nan_through(self):
        out = rk4_step(lambda s: s * np.inf, np.array([1.0]), 0.1, check=False)
        assert not np.isfinite(out[0])


class TestEvents:
    """Test event application on the time grid."""

    def test_off_grid_event_splits_step(self):
        """Test an event between grid points splits the step at the event time."""
        plant = Plant("vsg-original")
        params = PlantParams()
        y0 = plant.initial_vector(params, SwingState(0.3, 0.0))
        dt = 1e-3
        events = [TimedEvent(0.4 * dt, {"v_g": 0.5})]
        samples = list(march(plant, params, y0, events, StepConfig(dt=dt, t_end=dt)))

        after = apply_changes(params, {"v_g": 0.5})
        y_mid = rk4_step(lambda s: plant.rhs(params, s), y0, 0.4 * dt)
        expected = rk4_step(lambda s: plant.rhs(after, s), y_mid, 0.6 * dt)
        t, in_force, y = samples[-1]
        assert t == pytest.approx(dt)
        assert in_force.grid.v_g == 0.5
        np.testing.assert_allclose(y, expected, rtol=1e-14)

    def test_event_at_zero_applies_before_first_sample(self):
        plant = Plant("vsg-original")
        traj = simulate(plant, PlantParams(), SwingState(0.3, 0.0),
                        [TimedEvent(0.0, {"gfm.j": 150.0})], StepConfig(dt=1e-3, t_end=0.01))
        assert traj.j_eff[0] == 150.0

    def test_unsorted_events(self):
        events = [TimedEvent(0.2, {"v_g": 0.5}), TimedEvent(0.1, {"v_g": 1.0})]
        with pytest.raises(ParameterError, match="sorted"):
            simulate("vsg-original", PlantParams(), SwingState(0.3, 0.0), events,
                     StepConfig(dt=1e-3, t_end=0.5))

    def test_event_beyond_horizon(self):
        with pytest.raises(ParameterError, match="beyond t_end"):
            simulate("vsg-original", PlantParams(), SwingState(0.3, 0.0),
                     [TimedEvent(2.0, {"v_g": 0.5})], StepConfig(dt=1e-3, t_end=0.5))


class TestSimulate:
    """Test trajectory recording."""

    def test_rest_at_equilibrium(self):
        """Test a VSG started at its SEP stays there."""
        plant = Plant("vsg-original")
        params = PlantParams()
        sep = plant.equilibria(params).sep
        traj = simulate(plant, params, SwingState(sep, 0.0), cfg=StepConfig(dt=1e-3, t_end=0.1))
        assert len(traj) == 101
        np.testing.assert_allclose(traj.delta, sep, atol=1e-12)
        np.testing.assert_allclose(traj.energy, 0.0, atol=1e-9)
        assert traj.variant == "vsg-original"

    def test_record_every_keeps_endpoints(self):
        traj = simulate("vsg-original", PlantParams(), SwingState(0.3, 0.0),
                        cfg=StepConfig(dt=1e-3, t_end=0.01, record_every=4))
        assert traj.t[0] == 0.0
        assert traj.t[-1] == pytest.approx(0.010)
        assert len(traj) == 4

    def test_rejects_non_finite_start(self):
        with pytest.raises(ParameterError, match="initial state"):
            simulate("vsg-original", PlantParams(), SwingState(math.nan, 0.0))

    def test_window_and_sample(self):
        traj = make_trajectory([0.0, 0.1, 0.2, 0.3], [0.0, 1.0, 2.0, 3.0], [0.0] * 4)
        seg = traj.window(0.1, 0.3)
        np.testing.assert_array_equal(seg.t, [0.1, 0.2])
        assert traj.sample_at(0.19).delta == 2.0
        with pytest.raises(KeyError):
            traj.column("omega")


class TestDetectLossOfSync:
    """Test trajectory classification."""

    def test_settled(self):
        t = np.arange(0.0, 0.5, 0.01)
        verdict = detect_loss_of_sync(make_trajectory(t, np.full_like(t, SEP), 0 * t), SEP, UEP)
        assert verdict.kind is VerdictKind.STABLE
        assert verdict.t == 0.0

    def test_pole_slip_at_uep_crossing(self):
        """Test crossing the UEP with positive rate is a slip."""
        t = np.arange(0.0, 1.0, 0.01)
        delta = SEP + 3.0 * t
        verdict = detect_loss_of_sync(make_trajectory(t, delta, np.full_like(t, 3.0)), SEP, UEP)
        assert verdict.kind is VerdictKind.POLE_SLIP
        first = t[np.argmax(delta >= UEP)]
        assert verdict.t == pytest.approx(first)

    def test_resynchronization(self):
        """Test a slip followed by settling one turn later is Stable only with resync."""
        t = np.arange(0.0, 2.0, 0.01)
        delta = np.where(t < 1.0, SEP + 2.0 * math.pi * t, SEP + 2.0 * math.pi)
        rate = np.where(t < 1.0, 2.0 * math.pi, 0.0)
        traj = make_trajectory(t, delta, rate)
        assert detect_loss_of_sync(traj, SEP, UEP).kind is VerdictKind.POLE_SLIP
        resync = detect_loss_of_sync(traj, SEP, UEP, allow_resync=True)
        assert resync.kind is VerdictKind.STABLE
        assert resync.t == pytest.approx(1.0)

    def test_undetermined(self):
        """Test an oscillation that never settles or slips."""
        t = np.arange(0.0, 1.0, 0.01)
        traj = make_trajectory(t, SEP + 0.1 * np.sin(20 * t), 2.0 * np.cos(20 * t))
        assert detect_loss_of_sync(traj, SEP, UEP).kind is VerdictKind.UNDETERMINED

    def test_branch_of_first_sample(self):
        """Test equilibria are shifted to the branch of the first sample."""
        t = np.arange(0.0, 0.5, 0.01)
        delta = np.full_like(t, SEP - 2.0 * math.pi)
        assert detect_loss_of_sync(make_trajectory(t, delta, 0 * t), SEP, UEP).stable

    def test_empty(self):
        assert detect_loss_of_sync(make_trajectory([], [], []), SEP, UEP).kind \
            is VerdictKind.UNDETERMINED


class TestDetectDrift:
    """Test the verdict of windows without equilibrium."""

    def test_drifting(self):
        t = np.arange(0.0, 1.0, 0.01)
        verdict = detect_drift(make_trajectory(t, 10.0 * t, np.full_like(t, 10.0)))
        assert verdict.kind is VerdictKind.POLE_SLIP

    def test_held_angle(self):
        t = np.arange(0.0, 1.0, 0.01)
        verdict = detect_drift(make_trajectory(t, np.full_like(t, 0.7), 0 * t))
        assert verdict.kind is VerdictKind.STABLE


class TestWindowVerdicts:
    """Test per-window judging."""

    def test_fault_window_without_equilibrium(self):
        """Test each window is judged against its own parameters."""
        t = np.arange(0.0, 1.0, 0.01)
        traj = make_trajectory(t, np.where(t < 0.5, SEP, 0.9), 0 * t)
        windows = window_verdicts("pll-original", PlantParams(), traj,
                                  [TimedEvent(0.5, {"v_g": 0.02})])
        assert len(windows) == 2
        assert (windows[0].t_start, windows[0].t_stop) == (0.0, 0.5)
        assert windows[0].has_equilibrium and windows[0].verdict.stable
        assert not windows[1].has_equilibrium
        assert windows[1].verdict.kind is VerdictKind.STABLE
        assert windows[1].t_stop == pytest.approx(0.99)


class TestDiscreteStep:
    def test_increment_grows_with_acceleration(self):
        """Test the increment grows by (p_0 - p_e)*dt^2/j."""
        inc, accel = discrete_delta_step(1.0, 0.5, 2.0, 0.1, 0.01)
        assert accel == 0.25
        assert inc == pytest.approx(0.0125)
