"""
Canned experiments: the key-parameter preset, the fault ride-through scripts of
both control modes, the GFL/GFM analogy report and parameter sweeps.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from .control import Variant, compensating_current_for
from .errors import SyncArenaError, ParameterError
from .instrument import instrumented
from .integrate import (
    StepConfig,
    TimedEvent,
    Trajectory,
    Verdict,
    VerdictKind,
    WindowVerdict,
    detect_loss_of_sync,
    initial_params,
    simulate,
    window_verdicts,
)
from .models import SwingState, gfl_to_swing, gfm_to_swing
from .params import (
    CurrentSetpoint,
    GflParams,
    GfmParams,
    GridParams,
    PerUnitBase,
    combine_lines,
)
from .plant import Plant, PlantParams, apply_changes
from .stability import eac_gfl, eac_gfm

logger = logging.getLogger("syncarena.scenario")

# Line data of the key-parameter table
LINE_X = 0.5
LINE_R = 0.05
TRANSFORMER_X = 0.2
FILTER_X = 0.15
V_MREF = 1.05

# PLL gains of the table are per volt; the VSG inertia and damping are per watt
GFL_VOLTAGE_BASE = 311.0
GFM_POWER_BASE = 0.05e6

# Adaptive PLL gain reaches zero at v_pccq = -0.02 p.u.
ENHANCED_PLL_KNOT = 0.02

# Fault depth of the grid-following ride-through script (p.u.)
GFL_FAULT_DEPTH = 0.02
GFM_FAULT_DEPTH = 0.2

ORIGINAL_VSG_DAMPING = 100.0
ENHANCED_VSG_TOTAL_DAMPING = 4e3
LINEAR_INERTIA_GAIN = 2.4


@dataclass(frozen=True)
class Preset:
    """Named parameter set with its normal and fault operating points."""

    name: str
    base: PerUnitBase = field(default_factory=PerUnitBase)
    grid: GridParams = field(default_factory=GridParams)
    current: CurrentSetpoint = field(default_factory=CurrentSetpoint)
    current_fault: CurrentSetpoint = field(default_factory=lambda: CurrentSetpoint(0.0, -1.0))
    gfl: GflParams = field(default_factory=GflParams)
    gfm: GfmParams = field(default_factory=GfmParams)
    fault_v_g: float = GFM_FAULT_DEPTH
    trip_x_g: Optional[float] = None
    trip_r_g: Optional[float] = None
    default_variant: str = Variant.PLL_ORIGINAL.value

    @property
    def grid_fault(self) -> GridParams:
        return replace(self.grid, v_g=self.fault_v_g)

    @property
    def grid_tripped(self) -> GridParams:
        """Grid with one line out of service (the same grid when no trip data is set)."""
        if self.trip_x_g is None or self.trip_r_g is None:
            return self.grid
        return replace(self.grid, x_g=self.trip_x_g, r_g=self.trip_r_g)


def preset_table2(lines: str = "both", default_variant: str = Variant.PLL_ORIGINAL.value) -> Preset:
    """
    Key-parameter preset of the single-converter infinite-bus system.

    Args:
        lines: "both" for both lines in service, "single" for one line tripped
        default_variant: Controller variant used when none is requested
    """
    both_x, both_r = combine_lines([LINE_X, LINE_X], [LINE_R, LINE_R], TRANSFORMER_X)
    one_x, one_r = combine_lines([LINE_X], [LINE_R], TRANSFORMER_X)
    if lines == "both":
        x_g, r_g = both_x, both_r
    elif lines == "single":
        x_g, r_g = one_x, one_r
    else:
        raise ParameterError(f"lines must be 'both' or 'single', got {lines!r}")
    name = "table2" if lines == "both" else "table2-single"
    return Preset(
        name=name,
        base=PerUnitBase(s_n=0.05e6, v_n_peak=311.0, omega_0=100.0 * math.pi, i_n=107.0),
        grid=GridParams(r_g=r_g, x_g=x_g, v_g=1.0, x_t=TRANSFORMER_X, x_f=FILTER_X, v_pcc=V_MREF),
        current=CurrentSetpoint(i_d=1.0, i_q=0.0, i_rated=1.0),
        current_fault=CurrentSetpoint(i_d=0.0, i_q=-1.0, i_rated=1.0),
        gfl=GflParams(k_p=0.3, k_i=4.0, k_vq=None, voltage_base=GFL_VOLTAGE_BASE),
        gfm=GfmParams(j=300.0, d=ORIGINAL_VSG_DAMPING, p_0=0.8, j_0=300.0, n=5.0,
                      k_omega=ENHANCED_VSG_TOTAL_DAMPING - ORIGINAL_VSG_DAMPING,
                      power_base=GFM_POWER_BASE),
        fault_v_g=GFM_FAULT_DEPTH,
        trip_x_g=one_x if lines == "both" else None,
        trip_r_g=one_r if lines == "both" else None,
        default_variant=default_variant,
    )


PRESET_NAMES = ("table2", "table2-gfl", "table2-gfm", "table2-single")


def get_preset(name: str) -> Preset:
    """Look up a preset by name."""
    key = name.strip().lower()
    if key == "table2" or key == "table2-gfl":
        return replace(preset_table2(), name=key)
    if key == "table2-gfm":
        return replace(preset_table2(default_variant=Variant.VSG_ENHANCED.value), name=key)
    if key == "table2-single":
        return preset_table2(lines="single")
    raise ParameterError(f"unknown preset {name!r} (expected one of: {', '.join(PRESET_NAMES)})")


def variant_params(preset: Preset, variant) -> PlantParams:
    """Normal-operation parameter bundle of a controller variant on a preset."""
    variant = Variant.parse(variant)
    gfl, gfm = preset.gfl, preset.gfm
    if variant is Variant.PLL_ENHANCED:
        gfl = replace(gfl, k_i=0.0, k_vq=gfl.k_p / ENHANCED_PLL_KNOT)
    elif variant is Variant.PLL_FIRST_ORDER:
        gfl = replace(gfl, k_i=0.0)
    elif variant is Variant.VSG_ORIGINAL:
        gfm = replace(gfm, d=ORIGINAL_VSG_DAMPING, k_omega=0.0)
    elif variant is Variant.VSG_FIRST_ORDER:
        gfm = replace(gfm, d=gfm.total_damping, k_omega=0.0)
    elif variant is Variant.VSG_LINEAR_INERTIA:
        gfm = replace(gfm, k_lin=LINEAR_INERTIA_GAIN)
    return PlantParams(grid=preset.grid, current=preset.current, gfl=gfl, gfm=gfm)


def follow_kp(params: PlantParams, variant) -> PlantParams:
    """Re-derive the enhanced PLL's k_vq from k_p so the knot stays at -ENHANCED_PLL_KNOT."""
    if Variant.parse(variant) is not Variant.PLL_ENHANCED:
        return params
    return replace(params, gfl=replace(params.gfl, k_vq=params.gfl.k_p / ENHANCED_PLL_KNOT))


@dataclass(frozen=True)
class ScenarioSpec:
    """
    A controller variant, its starting parameters and an event timeline.

    init = None starts at the SEP of the parameters in force at t = 0. The
    overall verdict is taken from verdict_from on, against that same SEP.
    """

    name: str
    variant: Variant
    params: PlantParams
    events: Tuple[TimedEvent, ...] = ()
    cfg: StepConfig = StepConfig()
    init: Optional[SwingState] = None
    verdict_from: float = 0.0

    def __post_init__(self):
        for ev in self.events:
            if ev.t > self.cfg.t_end:
                raise ParameterError(f"event at t={ev.t} lies beyond t_end={self.cfg.t_end}")
        if not 0.0 <= self.verdict_from <= self.cfg.t_end:
            raise ParameterError(f"verdict_from must lie in [0, t_end], got {self.verdict_from}")

    def start_params(self) -> PlantParams:
        return initial_params(self.params, self.events)

    def initial_state(self) -> SwingState:
        if self.init is not None:
            return self.init
        eq = Plant(self.variant).equilibria(self.start_params()).require()
        return SwingState(eq.sep, 0.0)


def fault_scenario(preset: Preset, variant, depth: Optional[float] = None,
                   t_fault: float = 2.0, t_clear: float = 3.0, t_end: float = 5.0,
                   dt: float = 1e-4, kind: str = "dip", record_every: int = 1,
                   params: Optional[PlantParams] = None) -> ScenarioSpec:
    """
    Fault ride-through timeline: the grid voltage dips to depth at t_fault and
    recovers at t_clear.

    Grid-following variants switch to the fault current setpoint during the dip
    (the compensating current for pll-compensating) and pll-frozen holds its PLL.
    kind="line-trip" also trips one line at t_fault and leaves it out after
    clearing.
    """
    variant = Variant.parse(variant)
    if kind not in ("dip", "line-trip"):
        raise ParameterError(f"kind must be 'dip' or 'line-trip', got {kind!r}")
    if not 0.0 < t_fault <= t_clear <= t_end:
        raise ParameterError(f"need 0 < t_fault <= t_clear <= t_end, got {t_fault}, {t_clear}, {t_end}")
    if depth is None:
        depth = GFL_FAULT_DEPTH if variant.is_gfl else preset.fault_v_g
    params = params or variant_params(preset, variant)

    on: Dict[str, Any] = {"grid.v_g": depth}
    off: Dict[str, Any] = {"grid.v_g": params.grid.v_g}
    if kind == "line-trip":
        tripped = preset.grid_tripped
        on.update({"grid.x_g": tripped.x_g, "grid.r_g": tripped.r_g})
    if variant.is_gfl:
        fault_current = preset.current_fault
        if variant is Variant.PLL_COMPENSATING:
            fault_grid = replace(params.grid, v_g=depth)
            if kind == "line-trip":
                fault_grid = replace(fault_grid, x_g=preset.grid_tripped.x_g, r_g=preset.grid_tripped.r_g)
            fault_current = compensating_current_for(fault_grid, preset.current_fault.i_rated)
        on.update({"current.i_d": fault_current.i_d, "current.i_q": fault_current.i_q,
                   "current.i_rated": fault_current.i_rated})
        off.update({"current.i_d": params.current.i_d, "current.i_q": params.current.i_q,
                    "current.i_rated": params.current.i_rated})
        if variant is Variant.PLL_FROZEN:
            on["pll_frozen"] = True
            off["pll_frozen"] = False

    events = [TimedEvent(t_fault, on, label="fault")]
    if t_clear < t_end:
        events.append(TimedEvent(t_clear, off, label="clear"))
    return ScenarioSpec(
        name=f"{preset.name}:{variant.value}:{kind}",
        variant=variant,
        params=params,
        events=tuple(events),
        cfg=StepConfig(dt=dt, t_end=t_end, record_every=record_every),
        verdict_from=t_fault,
    )


@dataclass(frozen=True)
class ScenarioResult:
    """Trajectory, per-window verdicts and the overall verdict of a scenario run."""

    spec: ScenarioSpec
    trajectory: Trajectory
    windows: List[WindowVerdict]
    overall: Verdict

    @property
    def lost_sync(self) -> bool:
        return self.overall.kind is VerdictKind.POLE_SLIP or any(
            w.verdict.kind is VerdictKind.POLE_SLIP for w in self.windows)

    @property
    def stable(self) -> bool:
        return self.overall.stable and not self.lost_sync

    def summary(self) -> str:
        parts = [f"overall={self.overall}"]
        parts += [f"[{w.t_start:g},{w.t_stop:g})={w.verdict}" for w in self.windows]
        return " ".join(parts)


@instrumented("scenario")
def run_scenario(spec: ScenarioSpec, allow_resync: bool = True) -> ScenarioResult:
    """
    Simulate a scenario and judge it.

    Each window between events is judged against its own equilibria (resync
    allowed when allow_resync). The overall verdict covers the trajectory from
    spec.verdict_from on against the starting SEP, without resynchronization.
    """
    plant = Plant(spec.variant)
    traj = simulate(plant, spec.params, spec.initial_state(), spec.events, spec.cfg)
    windows = window_verdicts(plant, spec.params, traj, spec.events, allow_resync=allow_resync)
    eq = plant.equilibria(spec.start_params())
    tail = traj.window(spec.verdict_from)
    if eq.exists:
        overall = detect_loss_of_sync(tail, eq.sep, eq.uep)
    else:
        overall = Verdict(VerdictKind.UNDETERMINED)
    result = ScenarioResult(spec=spec, trajectory=traj, windows=windows, overall=overall)
    logger.debug(f"{spec.name}: {result.summary()}")
    return result


def _ride_through_variant(kind: str, mode: str) -> Variant:
    kind = kind.strip().lower()
    if kind not in ("original", "enhanced"):
        raise ParameterError(f"variant must be 'original' or 'enhanced', got {kind!r}")
    return Variant.parse(f"{mode}-{kind}")


def run_fig7(variant: str = "original", depth: float = GFL_FAULT_DEPTH, dt: float = 1e-4,
             t_end: float = 5.0, record_every: int = 1,
             preset: Optional[Preset] = None) -> ScenarioResult:
    """
    Grid-following ride-through: dip at 2 s, clearing at 3 s.

    "original" is the PI PLL, "enhanced" the proportional-only PLL with the
    adaptive gain. Window verdicts are [0, 2), [2, 3) and [3, t_end].
    """
    preset = preset or preset_table2()
    spec = fault_scenario(preset, _ride_through_variant(variant, "pll"), depth=depth,
                          t_fault=2.0, t_clear=3.0, t_end=t_end, dt=dt, record_every=record_every)
    return run_scenario(spec)


def run_fig8(variant: str = "original", depth: float = GFM_FAULT_DEPTH, dt: float = 1e-4,
             t_end: float = 5.0, record_every: int = 1,
             preset: Optional[Preset] = None) -> ScenarioResult:
    """
    Grid-forming ride-through: dip at 2 s, clearing at 2.4 s.

    "original" is the constant-inertia VSG with damping D only, "enhanced" the
    adaptive-inertia VSG with governor damping.
    """
    preset = preset or preset_table2(default_variant=Variant.VSG_ENHANCED.value)
    spec = fault_scenario(preset, _ride_through_variant(variant, "vsg"), depth=depth,
                          t_fault=2.0, t_clear=2.4, t_end=t_end, dt=dt, record_every=record_every)
    return run_scenario(spec)


ANALOGY_ROWS = (
    ("k_p ~ 1/D",
     "PLL proportional gain k_p acts in inverse proportion to damping D of the VSG"),
    ("k_i = J = 0",
     "k_i = 0 (GFL) and J = 0 (GFM) both reduce the swing to a first-order system"),
    ("k_i ~ m_i",
     "PLL integral gain k_i plays the role of the integral droop gain m_i"),
    ("J ~ 1/w_c",
     "VSG inertia J corresponds to the inverse cut-off frequency w_c of a droop filter"),
)


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def analogy_report(preset: Optional[Preset] = None) -> str:
    """
    Text table of the parameter analogies between the two control modes.

    With a preset, each row carries the numbers of that preset mapped onto the
    common swing form, followed by the first-order reductions and the frozen-PLL
    limit.
    """
    lines = ["Analogous relationships between grid-following and grid-forming control", ""]
    width = max(len(r[0]) for r in ANALOGY_ROWS)
    for i, (relation, text) in enumerate(ANALOGY_ROWS, start=1):
        lines.append(f"{i}. {relation.ljust(width)}  {text}")
    if preset is None:
        return "\n".join(lines) + "\n"

    normal = variant_params(preset, Variant.PLL_ORIGINAL)
    gfl_sw = gfl_to_swing(normal.gfl, normal.grid, normal.current)
    plant = Plant(Variant.PLL_ORIGINAL)
    gfl_eq = plant.equilibria(normal)
    gfm_params = variant_params(preset, Variant.VSG_ENHANCED)
    gfm_sw = gfm_to_swing(gfm_params.gfm, gfm_params.grid, include_governor=True)
    gfl = normal.gfl

    lines += ["", f"Preset {preset.name}", ""]
    lines.append(f"  GFL  J_eq = (1 - k_p*l_g*i_d)/k_i = {_fmt(gfl_sw.j_eq)}")
    lines.append(f"       P0_eq = w_0*l_g*i_d + r_g*i_q = {_fmt(gfl_sw.p0_eq)}")
    lines.append(f"       Pem_eq = v_g = {_fmt(gfl_sw.pem_eq)}")
    if gfl_eq.exists:
        lines.append(f"       D_eq(SEP) = k_p*v_g*cos/k_i - l_g*i_d = {_fmt(gfl_sw.frozen_damping(gfl_eq.sep))}")
    lines.append(f"  GFM  J = {_fmt(gfm_sw.j_eq)}  D + k_w = {_fmt(gfm_params.gfm.total_damping)}  "
                 f"P_0 = {_fmt(gfm_sw.p0_eq)}  Pem = {_fmt(gfm_sw.pem_eq)}")
    lines.append("")
    lines.append(f"  first order, GFL (k_i = 0): delta' = k_p*v_pccq with k_p = {_fmt(gfl.kp_eff)}")
    lines.append(f"  first order, GFM (J = 0):   delta' = (P_0 - Pem*sin(delta))/D with "
                 f"1/D = {_fmt(1.0 / gfm_params.gfm.total_damping)}")
    lines.append("  frozen PLL: k_p = 0 holds the angle, the limit of infinite damping")
    return "\n".join(lines) + "\n"


SWEEP_KEYS = {
    "fault_depth": None,
    "clear_time": None,
    "k_p": "gfl.k_p",
    "k_i": "gfl.k_i",
    "k_omega": "gfm.k_omega",
    "n": "gfm.n",
    "j": "gfm.j",
}


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid run over fault scenarios of one preset and variant."""

    preset: Preset
    variant: Variant
    axes: Tuple[Tuple[str, Tuple[float, ...]], ...]
    t_fault: float = 2.0
    clear_time: float = 1.0
    depth: Optional[float] = None
    t_end: float = 5.0
    dt: float = 1e-4
    kind: str = "dip"
    with_eac: bool = False

    def __post_init__(self):
        if not self.axes or any(not values for _, values in self.axes):
            raise ParameterError("a sweep needs at least one axis with at least one value")
        for key, _ in self.axes:
            if key not in SWEEP_KEYS and "." not in key:
                raise ParameterError(f"unknown sweep axis {key!r}")

    def points(self) -> List[Dict[str, float]]:
        names = [k for k, _ in self.axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in self.axes))]


SWEEP_COLUMNS = ("verdict", "t_verdict", "margin", "error")


def _sweep_point(job) -> Dict[str, Any]:
    spec, point = job
    row: Dict[str, Any] = dict(point)
    row.update({"verdict": "", "t_verdict": math.nan, "margin": math.nan, "error": ""})
    try:
        params = variant_params(spec.preset, spec.variant)
        gains = {SWEEP_KEYS.get(k) or k: v for k, v in point.items()
                 if k not in ("fault_depth", "clear_time")}
        if gains:
            params = apply_changes(params, gains)
            if "gfl.k_p" in gains and "gfl.k_vq" not in gains:
                params = follow_kp(params, spec.variant)
        clear = point.get("clear_time", spec.clear_time)
        depth = point.get("fault_depth", spec.depth)
        scenario = fault_scenario(spec.preset, spec.variant, depth=depth, t_fault=spec.t_fault,
                                  t_clear=min(spec.t_fault + clear, spec.t_end), t_end=spec.t_end,
                                  dt=spec.dt, kind=spec.kind, params=params)
        result = run_scenario(scenario)
        row["verdict"] = result.overall.kind.value
        row["t_verdict"] = math.nan if result.overall.t is None else result.overall.t
        if spec.with_eac:
            try:
                row["margin"] = _sweep_margin(scenario, result)
            except SyncArenaError as e:
                row["error"] = f"eac: {type(e).__name__}: {e}"
    except SyncArenaError as e:
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def fault_windows(spec: ScenarioSpec) -> Tuple[PlantParams, PlantParams, PlantParams]:
    """
    Parameters before, during and after the fault of a ride-through scenario.

    The fault is the first event after t = 0 and the clearing the next one; a
    timeline without clearing keeps the fault parameters afterwards.
    """
    start = spec.start_params()
    later = [ev for ev in spec.events if ev.t > 0.0]
    if not later:
        return start, start, start
    fault_params = apply_changes(start, later[0].changes)
    post_params = apply_changes(fault_params, later[1].changes) if len(later) > 1 else fault_params
    return start, fault_params, post_params


def _sweep_margin(scenario: ScenarioSpec, result: ScenarioResult) -> float:
    plant = Plant(scenario.variant)
    start, fault_params, post_params = fault_windows(scenario)
    pre_sw = plant.equivalent_swing(start)
    fault_sw = plant.equivalent_swing(fault_params)
    post_sw = plant.equivalent_swing(post_params)
    if pre_sw is None or fault_sw is None or post_sw is None:
        return math.nan
    if scenario.variant.is_gfl:
        return eac_gfl(pre_sw, fault_sw).margin
    t_clear = scenario.events[1].t if len(scenario.events) > 1 else scenario.cfg.t_end
    delta_b = scenario.initial_state().delta
    delta_c = max(result.trajectory.sample_at(t_clear).delta, delta_b)
    return eac_gfm(fault_sw, post_sw, delta_b, delta_c).margin


@instrumented("scenario")
def sweep(spec: SweepSpec, jobs: int = 1) -> List[Dict[str, Any]]:
    """
    Run every grid point of a sweep.

    Rows keep the grid order regardless of jobs; a point that raises a domain
    error records it in the error column instead of aborting the sweep.
    """
    if jobs < 1:
        raise ParameterError(f"jobs must be at least 1, got {jobs}")
    jobs_list = [(spec, p) for p in spec.points()]
    logger.debug(f"Sweep of {len(jobs_list)} points on {jobs} workers")
    if jobs == 1 or len(jobs_list) == 1:
        return [_sweep_point(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, jobs_list))


def parse_axis(text: str) -> Tuple[str, Tuple[float, ...]]:
    """
    Parse a sweep axis 'name=v1,v2,...' or 'name=start:stop:count'.

    Raises:
        ParameterError: For malformed axes
    """
    if "=" not in text:
        raise ParameterError(f"sweep axis {text!r} must look like name=values")
    name, values = (s.strip() for s in text.split("=", 1))
    try:
        if ":" in values:
            start, stop, count = values.split(":")
            n = int(count)
            if n < 1:
                raise ValueError("count must be positive")
            if n == 1:
                return name, (float(start),)
            step = (float(stop) - float(start)) / (n - 1)
            return name, tuple(float(start) + i * step for i in range(n))
        return name, tuple(float(v) for v in values.split(",") if v.strip())
    except ValueError as e:
        raise ParameterError(f"bad values in sweep axis {text!r}: {e}")


def preset_rows(preset: Preset) -> List[Tuple[str, str]]:
    """Key values of a preset for listings."""
    g, c, f = preset.grid, preset.current, preset.current_fault
    return [
        ("base", f"S_n={preset.base.s_n:g} VA V_n={preset.base.v_n_peak:g} V "
                 f"w_0={preset.base.omega_0:.6g} rad/s I_n={preset.base.i_n:g} A"),
        ("grid", f"x_g={g.x_g!r} r_g={g.r_g!r} v_g={g.v_g:g} v_pcc={g.v_pcc:g} "
                 f"x_t={g.x_t:g} x_f={g.x_f:g}"),
        ("fault", f"v_g={preset.fault_v_g:g} i_d={f.i_d:g} i_q={f.i_q:g}"),
        ("current", f"i_d={c.i_d:g} i_q={c.i_q:g} i_rated={c.i_rated:g}"),
        ("gfl", f"k_p={preset.gfl.k_p:g} k_i={preset.gfl.k_i:g} voltage_base={preset.gfl.voltage_base:g}"),
        ("gfm", f"P_0={preset.gfm.p_0:g} J={preset.gfm.j:g} n={preset.gfm.n:g} "
                f"D={preset.gfm.d:g} k_w={preset.gfm.k_omega:g} power_base={preset.gfm.power_base:g}"),
        ("variant", preset.default_variant),
    ]


__all__ = [
    "Preset",
    "ScenarioSpec",
    "ScenarioResult",
    "SweepSpec",
    "PRESET_NAMES",
    "preset_table2",
    "get_preset",
    "variant_params",
    "follow_kp",
    "fault_scenario",
    "fault_windows",
    "run_scenario",
    "run_fig7",
    "run_fig8",
    "analogy_report",
    "sweep",
    "parse_axis",
    "preset_rows",
]
