"""
Fixed-step integration with timed parameter events, trajectory recording and
loss-of-synchronism detection.

All runs share the global time grid t_k = k*dt. An event that falls between two
grid points splits that step in two, so the parameters in force at a recorded
sample are always those of the last event with timestamp <= t.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NonFiniteState, ParameterError
from .instrument import instrumented
from .lyapunov import energy
from .models import EquivalentSwing, SwingState, swing_rhs
from .plant import Plant, PlantParams, apply_changes

logger = logging.getLogger("syncarena.integrate")

# Events closer than this to a grid point are applied on that grid point
EVENT_SNAP = 1e-9

TRAJECTORY_COLUMNS = ("t", "delta", "delta_dot", "v_pccq", "j_eff", "kp_eff", "energy")


@dataclass(frozen=True)
class StepConfig:
    """Step size, horizon and recording decimation of a run."""

    dt: float = 1e-4
    t_end: float = 5.0
    record_every: int = 1

    def __post_init__(self):
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0.0):
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not math.isfinite(self.t_end) or self.t_end < self.dt:
            raise ParameterError(f"t_end must be at least dt ({self.dt}), got {self.t_end}")
        if isinstance(self.record_every, bool) or not isinstance(self.record_every, int) \
                or self.record_every < 1:
            raise ParameterError(f"record_every must be an integer >= 1, got {self.record_every}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class TimedEvent:
    """Parameter overwrite applied at time t (keys as accepted by plant.apply_changes)."""

    t: float
    changes: Mapping[str, Any] = field(default_factory=dict)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0.0:
            raise ParameterError(f"event time must be finite and non-negative, got {self.t}")


class VerdictKind(Enum):
    STABLE = "Stable"
    POLE_SLIP = "PoleSlip"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Verdict:
    """Synchronization verdict; t is the settle time (Stable) or the slip time (PoleSlip)."""

    kind: VerdictKind
    t: Optional[float] = None

    @property
    def stable(self) -> bool:
        return self.kind is VerdictKind.STABLE

    def __str__(self):
        if self.t is None:
            return self.kind.value
        return f"{self.kind.value}({self.t:.4f})"


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one run, one numpy array per column."""

    t: np.ndarray
    delta: np.ndarray
    delta_dot: np.ndarray
    v_pccq: np.ndarray
    j_eff: np.ndarray
    kp_eff: np.ndarray
    energy: np.ndarray
    variant: str = ""

    def __len__(self):
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in TRAJECTORY_COLUMNS:
            raise KeyError(name)
        return getattr(self, name)

    def rows(self):
        """Iterate samples as tuples in TRAJECTORY_COLUMNS order."""
        return zip(*(self.column(c) for c in TRAJECTORY_COLUMNS))

    def window(self, t0: float, t1: Optional[float] = None) -> "Trajectory":
        """Samples with t0 <= t < t1 (t1 = None keeps everything to the end)."""
        mask = self.t >= t0 - EVENT_SNAP
        if t1 is not None:
            mask &= self.t < t1 - EVENT_SNAP
        return Trajectory(*(self.column(c)[mask] for c in TRAJECTORY_COLUMNS),
                          variant=self.variant)

    def final_state(self) -> SwingState:
        return SwingState(float(self.delta[-1]), float(self.delta_dot[-1]))

    def sample_at(self, t: float) -> SwingState:
        """Recorded state at the sample nearest to t."""
        i = int(np.argmin(np.abs(self.t - t)))
        return SwingState(float(self.delta[i]), float(self.delta_dot[i]))

    def summary(self) -> str:
        if not len(self):
            return "empty trajectory"
        return (f"{len(self)} samples over [{self.t[0]:.4g}, {self.t[-1]:.4g}] s, "
                f"final delta={self.delta[-1]:.4f}")


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float,
             t: Optional[float] = None, check: bool = True) -> np.ndarray:
    """
    Classical fourth-order Runge-Kutta step of an autonomous right-hand side.

    Works on any array shape, so a block of initial conditions stacked along the
    second axis is stepped at once.

    Raises:
        NonFiniteState: If check is set and any component of the result is NaN or infinite
    """
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if check and not np.all(np.isfinite(out)):
        raise NonFiniteState("state became non-finite", t=t, state=out)
    return out


def _check_events(events: Sequence[TimedEvent], t_end: float) -> List[TimedEvent]:
    events = list(events)
    for prev, nxt in zip(events, events[1:]):
        if nxt.t < prev.t:
            raise ParameterError(f"events must be sorted by time ({prev.t} > {nxt.t})")
    for ev in events:
        if ev.t > t_end + EVENT_SNAP:
            raise ParameterError(f"event at t={ev.t} lies beyond t_end={t_end}")
    return events


def _as_plant(model: Union[Plant, str, Any]) -> Plant:
    return model if isinstance(model, Plant) else Plant(model)


def initial_params(params: PlantParams, events: Sequence[TimedEvent]) -> PlantParams:
    """Bundle in force at t = 0, after the events stamped at t = 0."""
    for ev in events:
        if ev.t > EVENT_SNAP:
            break
        params = apply_changes(params, ev.changes)
    return params


def march(plant: Plant, params: PlantParams, y: np.ndarray, events: Sequence[TimedEvent],
          cfg: StepConfig, check: bool = True) -> Iterator[Tuple[float, PlantParams, np.ndarray]]:
    """
    Step a plant over the time grid, yielding (t, params, state) at each recorded sample.

    params is the bundle in force at t = 0 (events at t = 0 already applied) and y
    the matching state vector. The first yield is the initial sample.
    """
    events = _check_events(events, cfg.t_end)
    pending = 0
    while pending < len(events) and events[pending].t <= EVENT_SNAP:
        pending += 1
    dt, n_steps = cfg.dt, cfg.n_steps
    yield 0.0, params, y

    for k in range(n_steps):
        t, t1 = k * dt, (k + 1) * dt
        while pending < len(events) and events[pending].t < t1 - EVENT_SNAP:
            ev = events[pending]
            current = params
            y = rk4_step(lambda s: plant.rhs(current, s), y, ev.t - t, t=ev.t, check=check)
            t = ev.t
            params = apply_changes(params, ev.changes)
            logger.debug(f"t={ev.t:.6f}: applied {ev.label or dict(ev.changes)}")
            pending += 1
        current = params
        y = rk4_step(lambda s: plant.rhs(current, s), y, t1 - t, t=t1, check=check)
        while pending < len(events) and abs(events[pending].t - t1) <= EVENT_SNAP:
            params = apply_changes(params, events[pending].changes)
            pending += 1
        if (k + 1) % cfg.record_every == 0 or k + 1 == n_steps:
            yield t1, params, y


class _Recorder:
    def __init__(self, capacity: int):
        self._data = np.full((len(TRAJECTORY_COLUMNS), capacity), np.nan)
        self._n = 0

    def add(self, t: float, observed: Tuple[float, ...]):
        self._data[0, self._n] = t
        self._data[1:, self._n] = observed
        self._n += 1

    def build(self, variant: str) -> Trajectory:
        cols = [self._data[i, :self._n].copy() for i in range(len(TRAJECTORY_COLUMNS))]
        return Trajectory(*cols, variant=variant)


@instrumented("integrate")
def simulate(model, params: PlantParams, init: SwingState,
             events: Sequence[TimedEvent] = (), cfg: StepConfig = StepConfig(),
             record_energy: bool = True) -> Trajectory:
    """
    Integrate a controller variant through an event timeline.

    Args:
        model: Plant or controller variant name
        params: Parameter bundle in force at t = 0 (before events at t = 0)
        init: Initial phase-plane point
        events: Parameter overwrites sorted by time
        cfg: Step configuration
        record_energy: Record the classic energy of each window's SEP

    Returns:
        Trajectory sampled every cfg.record_every steps, endpoints included

    Raises:
        NonFiniteState: With the timestamp of the step that diverged
        ParameterError: For unsorted or out-of-horizon events and invalid overwrites
    """
    plant = _as_plant(model)
    if not (math.isfinite(init.delta) and math.isfinite(init.delta_dot)):
        raise ParameterError(f"initial state must be finite, got {init}")
    params = initial_params(params, _check_events(events, cfg.t_end))
    y = plant.initial_vector(params, init)
    logger.debug(f"Simulating {plant} for {cfg.t_end} s at dt={cfg.dt} with {len(events)} events")

    recorder = _Recorder(cfg.n_steps // cfg.record_every + 2)
    energy_params, energy_fn = None, None
    for t, current, state in march(plant, params, y, events, cfg):
        if record_energy and current is not energy_params:
            energy_params, energy_fn = current, plant.window_energy(current)
        recorder.add(t, plant.observe(current, state, energy_fn))
    return recorder.build(plant.variant.value)


@instrumented("integrate")
def simulate_swing(sw: EquivalentSwing, init: SwingState, cfg: StepConfig = StepConfig(),
                   energy_fn=None, stop: Optional[Callable[[float, float], bool]] = None) -> Trajectory:
    """
    Integrate the generic swing model with fixed coefficients.

    Args:
        sw: Swing coefficients
        init: Initial phase-plane point
        cfg: Step configuration
        energy_fn: Optional energy function recorded in the energy column
        stop: Optional predicate on (delta, delta_dot) ending the run after the
            first recorded sample where it holds

    Raises:
        NonFiniteState: With the timestamp of the step that diverged
    """
    y = init.as_array()
    recorder = _Recorder(cfg.n_steps // cfg.record_every + 2)
    nan = math.nan

    def record(t, state):
        e = float(energy(energy_fn, state)) if energy_fn is not None else nan
        recorder.add(t, (state[0], state[1], nan, sw.j_eq, nan, e))

    record(0.0, y)
    for k in range(cfg.n_steps):
        t1 = (k + 1) * cfg.dt
        y = rk4_step(lambda s: swing_rhs(sw, s), y, cfg.dt, t=t1)
        if (k + 1) % cfg.record_every == 0 or k + 1 == cfg.n_steps:
            record(t1, y)
            if stop is not None and stop(y[0], y[1]):
                break
    return recorder.build("swing")


def discrete_delta_step(p_0: float, p_e: float, j: float, dt: float,
                        prev_delta_inc: float) -> Tuple[float, float]:
    """
    One step of the discrete angle propagation.

    The increment grows by (p_0 - p_e)*dt^2/j per step; the acceleration
    (p_0 - p_e)/j is inversely proportional to the inertia.

    Returns:
        Tuple (delta_inc, accel)
    """
    accel = (p_0 - p_e) / j
    return prev_delta_inc + accel * dt * dt, accel


@instrumented("integrate")
def simulate_discrete(params: PlantParams, init: SwingState,
                      events: Sequence[TimedEvent] = (),
                      cfg: StepConfig = StepConfig()) -> Trajectory:
    """
    VSG angle trajectory produced by the discrete propagation scheme.

    delta_(n+1) = delta_(n) + Delta_delta_(n+1) with the electrical power
    pem*sin(delta_n) and the damping power d*Delta_delta_(n)/dt on the braking
    side. Only the constant-inertia VSG is covered.
    """
    plant = Plant("vsg-original")
    events = _check_events(events, cfg.t_end)
    dt, n_steps = cfg.dt, cfg.n_steps
    pending = 0
    while pending < len(events) and events[pending].t <= EVENT_SNAP:
        params = apply_changes(params, events[pending].changes)
        pending += 1

    delta, inc = init.delta, init.delta_dot * dt
    energy_fn = plant.window_energy(params)
    recorder = _Recorder(n_steps // cfg.record_every + 2)
    recorder.add(0.0, plant.observe(params, np.array([delta, inc / dt]), energy_fn))
    for k in range(n_steps):
        t1 = (k + 1) * dt
        gfm = params.gfm
        pem = gfm.power_base * plant.gfm_pem_pu(params)
        p_e = pem * math.sin(delta) + gfm.d * inc / dt
        inc, _ = discrete_delta_step(gfm.p_0 * gfm.power_base, p_e, gfm.j, dt, inc)
        delta += inc
        if not (math.isfinite(delta) and math.isfinite(inc)):
            raise NonFiniteState("discrete propagation diverged", t=t1, state=(delta, inc))
        while pending < len(events) and events[pending].t <= t1 + EVENT_SNAP:
            params = apply_changes(params, events[pending].changes)
            energy_fn = plant.window_energy(params)
            pending += 1
        if (k + 1) % cfg.record_every == 0 or k + 1 == n_steps:
            recorder.add(t1, plant.observe(params, np.array([delta, inc / dt]), energy_fn))
    return recorder.build("vsg-discrete")


def _settle_index(t: np.ndarray, settled: np.ndarray, sustain: float) -> Optional[int]:
    """First index starting a run of settled samples lasting at least sustain seconds."""
    start = None
    for i in range(len(t)):
        if settled[i]:
            if start is None:
                start = i
            if t[i] - t[start] >= sustain - EVENT_SNAP:
                return start
        else:
            start = None
    return None


def detect_loss_of_sync(traj: Trajectory, sep: float, uep: float, allow_resync: bool = False,
                        angle_tol: float = 0.01, rate_tol: float = 0.01,
                        sustain: float = 0.2) -> Verdict:
    """
    Classify a trajectory against an equilibrium pair.

    The equilibria are shifted by whole turns to the branch nearest the first
    sample (nearest the last sample with allow_resync). A pole slip is the angle
    leaving (uep - 2*pi, uep) with a rate of escaping sign, or drifting more than
    2*pi from the SEP. Stability needs |delta - sep| < angle_tol and
    |delta_dot| < rate_tol held for sustain seconds. With allow_resync a slip that
    is followed by settling on another branch counts as Stable.
    """
    if not len(traj):
        return Verdict(VerdictKind.UNDETERMINED)
    anchor = traj.delta[-1] if allow_resync else traj.delta[0]
    shift = 2.0 * math.pi * round((anchor - sep) / (2.0 * math.pi))
    sep_b, uep_b = sep + shift, uep + shift

    settled = (np.abs(traj.delta - sep_b) < angle_tol) & (np.abs(traj.delta_dot) < rate_tol)
    settle = _settle_index(traj.t, settled, sustain)

    start_shift = 2.0 * math.pi * round((traj.delta[0] - sep) / (2.0 * math.pi))
    sep_0, uep_0 = sep + start_shift, uep + start_shift
    escaped = (((traj.delta >= uep_0) & (traj.delta_dot > 0.0))
               | ((traj.delta <= uep_0 - 2.0 * math.pi) & (traj.delta_dot < 0.0))
               | (np.abs(traj.delta - sep_0) > 2.0 * math.pi))
    slip = int(np.argmax(escaped)) if escaped.any() else None

    if allow_resync and settle is not None:
        return Verdict(VerdictKind.STABLE, float(traj.t[settle]))
    if slip is not None and (settle is None or slip < settle):
        return Verdict(VerdictKind.POLE_SLIP, float(traj.t[slip]))
    if settle is not None:
        return Verdict(VerdictKind.STABLE, float(traj.t[settle]))
    return Verdict(VerdictKind.UNDETERMINED)


def detect_drift(traj: Trajectory, rate_tol: float = 0.01, sustain: float = 0.2) -> Verdict:
    """
    Verdict of a window whose parameters admit no equilibrium.

    PoleSlip once the angle has drifted more than 2*pi from its first sample,
    Stable when the rate stays below rate_tol for sustain seconds (a held angle).
    """
    if not len(traj):
        return Verdict(VerdictKind.UNDETERMINED)
    drifted = np.abs(traj.delta - traj.delta[0]) > 2.0 * math.pi
    slip = int(np.argmax(drifted)) if drifted.any() else None
    settle = _settle_index(traj.t, np.abs(traj.delta_dot) < rate_tol, sustain)
    if slip is not None and (settle is None or slip < settle):
        return Verdict(VerdictKind.POLE_SLIP, float(traj.t[slip]))
    if settle is not None:
        return Verdict(VerdictKind.STABLE, float(traj.t[settle]))
    return Verdict(VerdictKind.UNDETERMINED)


@dataclass(frozen=True)
class WindowVerdict:
    """Verdict of one constant-parameter window [t_start, t_stop)."""

    t_start: float
    t_stop: float
    verdict: Verdict
    has_equilibrium: bool


def window_verdicts(model, params: PlantParams, traj: Trajectory,
                    events: Sequence[TimedEvent] = (), allow_resync: bool = True,
                    angle_tol: float = 0.01, rate_tol: float = 0.01,
                    sustain: float = 0.2) -> List[WindowVerdict]:
    """
    Judge every window between events against that window's own equilibria.

    Windows without an equilibrium fall back to detect_drift.
    """
    plant = _as_plant(model)
    t_end = float(traj.t[-1]) if len(traj) else 0.0
    boundaries: List[Tuple[float, PlantParams]] = []
    for ev in events:
        if ev.t <= EVENT_SNAP:
            params = apply_changes(params, ev.changes)
            continue
        boundaries.append((ev.t, params))
        params = apply_changes(params, ev.changes)
    boundaries.append((math.inf, params))

    out: List[WindowVerdict] = []
    t_start = 0.0
    for t_stop, window_params in boundaries:
        seg = traj.window(t_start, None if math.isinf(t_stop) else t_stop)
        eq = plant.equilibria(window_params)
        if eq.exists:
            verdict = detect_loss_of_sync(seg, eq.sep, eq.uep, allow_resync=allow_resync,
                                          angle_tol=angle_tol, rate_tol=rate_tol, sustain=sustain)
        else:
            verdict = detect_drift(seg, rate_tol=rate_tol, sustain=sustain)
        out.append(WindowVerdict(t_start, min(t_stop, t_end), verdict, eq.exists))
        t_start = t_stop
    return out
