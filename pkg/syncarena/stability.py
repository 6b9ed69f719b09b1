"""
Stability analysis: equal-area criteria, critical clearing, energy-function
region-of-attraction estimates and the brute-force basin oracle.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.integrate import quad
from scipy.optimize import brentq

from .contour import enclosing_contour, extract_contours, points_in_polygon
from .errors import AlwaysStable, DegenerateLevelSet, NeverStable, NoEquilibrium, ParameterError
from .instrument import instrumented
from .integrate import (
    EVENT_SNAP,
    StepConfig,
    TimedEvent,
    VerdictKind,
    detect_loss_of_sync,
    initial_params,
    march,
    simulate_swing,
)
from .lyapunov import (
    EnergyFunction,
    EnergyKind,
    Equilibria,
    energy,
    energy_function,
    find_equilibria,
    flow_vdot,
    numerical_vdot,
    swing_equilibria,
    vdot_classic,
    vdot_modified,
)
from .models import EquivalentSwing, SwingState
from .plant import Plant, PlantParams, apply_changes

logger = logging.getLogger("syncarena.stability")

TWO_PI = 2.0 * math.pi

# Cells per basin block; blocks are fixed so results do not depend on the worker count
BASIN_BLOCK = 4096


@dataclass(frozen=True)
class EacResult:
    """Equal-area comparison: available area minus required area."""

    s_plus: float
    s_minus: float
    margin: float
    stable: bool
    delta_b: float
    delta_c: float
    delta_limit: float

    def summary(self) -> str:
        return (f"S+={self.s_plus:.6g} S-={self.s_minus:.6g} margin={self.margin:.6g} "
                f"stable={self.stable}")


def _power_area(sw: EquivalentSwing, a: float, b: float) -> float:
    """Signed integral of p0_eq - pem_eq*sin(delta) from a to b."""
    value, _ = quad(lambda d: sw.p0_eq - sw.pem_eq * math.sin(d), a, b, epsabs=1e-12, epsrel=1e-12)
    closed = sw.p0_eq * (b - a) + sw.pem_eq * (math.cos(b) - math.cos(a))
    if abs(value - closed) > 1e-8 * max(1.0, abs(closed)):
        logger.debug(f"quad area {value} differs from closed form {closed}")
    return value


def _sep_near(sw: EquivalentSwing, delta: float, what: str) -> Equilibria:
    eq = swing_equilibria(sw)
    if not eq.exists:
        raise NoEquilibrium(f"the {what} system has no stable equilibrium point "
                            f"(P0_eq={sw.p0_eq:.6g}, Pem_eq={sw.pem_eq:.6g})")
    return eq.nearest_branch(delta)


def eac_gfl(pre_fault: EquivalentSwing, fault: EquivalentSwing,
            init: Optional[SwingState] = None) -> EacResult:
    """
    Resynchronization test of the PLL-synchronized converter under a fault.

    The angle jumps from delta_B (the pre-fault state, the pre-fault SEP when init
    is omitted) towards the fault SEP delta_C. The required area is
    |int_{delta_B}^{delta_C} (p0 - pem*sin)|, the available one
    |int_{-pi/2}^{delta_C} (p0 - pem*sin)|, both on the fault system.

    Raises:
        NoEquilibrium: When the fault system has no SEP
    """
    if init is None:
        pre = swing_equilibria(pre_fault).require()
        init = SwingState(pre.sep, 0.0)
    eq = _sep_near(fault, init.delta, "fault")
    delta_b, delta_c = init.delta, eq.sep
    lower = delta_c - swing_equilibria(fault).sep - 0.5 * math.pi
    s_minus = abs(_power_area(fault, delta_b, delta_c))
    s_plus = abs(_power_area(fault, lower, delta_c))
    margin = s_plus - s_minus
    return EacResult(s_plus=s_plus, s_minus=s_minus, margin=margin, stable=margin > 0.0,
                     delta_b=delta_b, delta_c=delta_c, delta_limit=lower)


def eac_gfm(fault: EquivalentSwing, post: EquivalentSwing, delta_b: float,
            delta_clear: float) -> EacResult:
    """
    Equal-area test of the VSG for a fault cleared at angle delta_clear.

    S+ = int_{delta_B}^{delta_c} (p0 - pem_fault*sin) (clamped at 0) and
    S-max = |int_{delta_c}^{delta_UEP} (p0 - pem_post*sin)|; stable when S-max > S+.

    Raises:
        NoEquilibrium: When the post-fault system has no SEP
        ParameterError: If delta_clear < delta_b
    """
    if delta_clear < delta_b:
        raise ParameterError(f"delta_clear ({delta_clear}) must not be below delta_b ({delta_b})")
    eq = _sep_near(post, delta_b, "post-fault")
    s_plus = max(_power_area(fault, delta_b, delta_clear), 0.0)
    if delta_clear >= eq.uep:
        s_minus = 0.0
    else:
        s_minus = abs(_power_area(post, delta_clear, eq.uep))
    margin = s_minus - s_plus
    return EacResult(s_plus=s_plus, s_minus=s_minus, margin=margin, stable=margin > 0.0,
                     delta_b=delta_b, delta_c=delta_clear, delta_limit=eq.uep)


def _time_to_angle(fault: EquivalentSwing, init: SwingState, angle: float,
                   cfg: StepConfig) -> Optional[float]:
    """First time the fault-on trajectory reaches angle, linearly interpolated between samples."""
    if angle <= init.delta:
        return 0.0
    traj = simulate_swing(fault, init, cfg, stop=lambda d, _: d >= angle)
    hits = np.nonzero(traj.delta >= angle)[0]
    if not len(hits):
        return None
    i = int(hits[0])
    if i == 0:
        return 0.0
    d0, d1 = traj.delta[i - 1], traj.delta[i]
    return float(traj.t[i - 1] + (angle - d0) / (d1 - d0) * (traj.t[i] - traj.t[i - 1]))


def _survives(fault: EquivalentSwing, post: EquivalentSwing, init: SwingState,
              t_clear: float, cfg: StepConfig, horizon: float) -> Tuple[bool, float]:
    """Simulated predicate: no pole slip within horizon after clearing at t_clear."""
    dt = cfg.dt
    if t_clear > 0.0:
        fault_cfg = StepConfig(dt=dt, t_end=max(t_clear, dt))
        on = simulate_swing(fault, init, fault_cfg)
        at_clear = SwingState(float(on.delta[-1]), float(on.delta_dot[-1]))
    else:
        at_clear = init
    eq = _sep_near(post, init.delta, "post-fault")
    after = simulate_swing(post, at_clear, StepConfig(dt=dt, t_end=horizon))
    verdict = detect_loss_of_sync(after, eq.sep, eq.uep)
    return verdict.kind is not VerdictKind.POLE_SLIP, at_clear.delta


def critical_clearing(fault: EquivalentSwing, post: EquivalentSwing,
                      init: Optional[SwingState] = None, via: str = "eac",
                      cfg: StepConfig = StepConfig(dt=1e-4, t_end=5.0),
                      horizon: float = 5.0) -> Tuple[float, Optional[float]]:
    """
    Critical clearing angle and time of a fault.

    via="eac" finds the root of the eac_gfm margin in the clearing angle and maps
    it to a time along the fault-on trajectory. via="simulation" bisects the
    clearing time (to 1e-4 s) on the simulated no-pole-slip predicate.

    Args:
        fault: Fault-on swing system
        post: Post-fault swing system
        init: Fault inception state (post-fault SEP at rest when omitted)
        via: "eac" or "simulation"
        cfg: Step of the simulations; cfg.t_end bounds the clearing time searched
        horizon: Post-fault simulation length of the simulated predicate

    Returns:
        Tuple (angle, time); time is None when the fault-on trajectory never
        reaches the critical angle within cfg.t_end

    Raises:
        NoEquilibrium: When the post-fault system has no SEP
        AlwaysStable: When no clearing angle/time in range is unstable
        NeverStable: When even immediate clearing is unstable
    """
    if init is None:
        init = SwingState(swing_equilibria(post).require().sep, 0.0)
    eq = _sep_near(post, init.delta, "post-fault")

    if via == "eac":
        def margin(angle):
            return eac_gfm(fault, post, init.delta, angle).margin

        lo, hi = init.delta, eq.uep
        if margin(lo) <= 0.0:
            raise NeverStable(f"clearing at the inception angle {lo:.6f} is already unstable")
        if eac_gfm(fault, post, init.delta, hi).s_plus <= 0.0:
            raise AlwaysStable("the fault leaves no accelerating area up to the UEP")
        angle = brentq(margin, lo, hi, xtol=1e-9)
        return angle, _time_to_angle(fault, init, angle, cfg)

    if via != "simulation":
        raise ParameterError(f"via must be 'eac' or 'simulation', got {via!r}")
    ok0, _ = _survives(fault, post, init, 0.0, cfg, horizon)
    if not ok0:
        raise NeverStable("immediate clearing already loses synchronism")
    t_hi = cfg.t_end
    ok_hi, _ = _survives(fault, post, init, t_hi, cfg, horizon)
    if ok_hi:
        raise AlwaysStable(f"no pole slip for clearing times up to {t_hi} s")
    t_lo = 0.0
    while t_hi - t_lo > 1e-4:
        mid = round(0.5 * (t_lo + t_hi) / cfg.dt) * cfg.dt
        if mid <= t_lo + EVENT_SNAP or mid >= t_hi - EVENT_SNAP:
            break
        ok, _ = _survives(fault, post, init, mid, cfg, horizon)
        if ok:
            t_lo = mid
        else:
            t_hi = mid
    angle = init.delta
    if t_lo > 0.0:
        _, angle = _survives(fault, post, init, t_lo, cfg, horizon)
    return angle, t_lo


@dataclass(frozen=True)
class RoaEstimate:
    """
    Energy sublevel-set estimate of the region of attraction around the SEP.

    area is the polygon area inside the V = c boundary. area_vdot is the grid
    area of the same sublevel set after removing the states where V-dot > 0,
    the set the decrease condition actually certifies. Both are reported; they
    agree up to the grid spacing when V-dot <= 0 holds on the whole set, as it
    does for the printed V-dot expressions.
    """

    c: float
    boundary: np.ndarray
    area: float
    area_vdot: float
    kind: EnergyKind
    sep: float
    uep: float

    def contains(self, delta, delta_dot) -> np.ndarray:
        """Points strictly inside the boundary polygon."""
        return points_in_polygon(self.boundary, np.atleast_1d(delta), np.atleast_1d(delta_dot))

    def sample_interior(self, f: EnergyFunction, n: int, rng: np.random.Generator,
                        shrink: float = 0.98, max_draws: int = 1_000_000) -> np.ndarray:
        """
        n states with V < shrink*c inside the boundary, drawn uniformly from the
        bounding box by rejection.
        """
        lo = self.boundary.min(axis=0)
        hi = self.boundary.max(axis=0)
        found: List[np.ndarray] = []
        drawn = 0
        while sum(len(b) for b in found) < n and drawn < max_draws:
            batch = rng.uniform(lo, hi, size=(4 * n, 2))
            drawn += len(batch)
            v = energy(f, (batch[:, 0], batch[:, 1]))
            keep = (v < shrink * self.c) & self.contains(batch[:, 0], batch[:, 1])
            found.append(batch[keep])
        samples = np.concatenate(found) if found else np.empty((0, 2))
        return samples[:n]

    def summary(self) -> str:
        return (f"c={self.c!r} kind={self.kind.value} area={self.area!r} "
                f"area_vdot={self.area_vdot!r}")


def _vdot_field(f: EnergyFunction, delta, delta_dot, vdot: str):
    if vdot == "flow":
        return flow_vdot(f, (delta, delta_dot))
    if vdot != "printed":
        raise ParameterError(f"vdot must be 'printed' or 'flow', got {vdot!r}")
    if f.kind is EnergyKind.MODIFIED:
        return vdot_modified(f, (delta, delta_dot))
    return vdot_classic(f, (delta, delta_dot))


@instrumented("stability")
def estimate_roa(f: EnergyFunction, eq: Optional[Equilibria] = None, resolution: int = 801,
                 vdot: str = "printed", rate_margin: float = 1.2) -> RoaEstimate:
    """
    Sublevel set {V < c} around the SEP with c = V(uep, 0).

    The level set is traced on a resolution x resolution grid spanning the strip
    between the two saddles, delta in [uep - 2*pi, uep], and
    |delta_dot| <= rate_margin*sqrt(2c/j); the crossings are refined onto V = c.
    When the left saddle lies lower (P_0 < 0) its energy is the level instead, so
    the set never spills into a neighbouring well. area is the polygon area of the
    enclosing contour, area_vdot the grid area of the sublevel component where
    V-dot <= 0.

    Raises:
        NoEquilibrium: Without an SEP/UEP pair
        DegenerateLevelSet: When no closed contour at level c encloses the SEP
    """
    if eq is None:
        eq = Equilibria(sep=f.sep, uep=math.pi - f.sep)
    eq.require()
    if resolution < 3:
        raise ParameterError(f"resolution must be at least 3, got {resolution}")
    left = eq.uep - TWO_PI
    c = min(float(energy(f, (eq.uep, 0.0))), float(energy(f, (left, 0.0))))
    if not c > 0.0:
        raise DegenerateLevelSet(f"level c = {c} at the UEP is not positive")
    rate = rate_margin * math.sqrt(2.0 * c / f.j)
    x = np.linspace(left, eq.uep, resolution)
    y = np.linspace(-rate, rate, resolution)
    dd, rr = np.meshgrid(x, y)
    z = energy(f, (dd, rr))

    contours = extract_contours(x, y, z, c, func=lambda a, b: float(energy(f, (a, b))))
    boundary = enclosing_contour(contours, eq.sep, 0.0)
    if boundary is None:
        raise DegenerateLevelSet(f"no closed level set V = {c:.6g} encloses the SEP {eq.sep:.6f}")

    labels, _ = ndimage.label(z < c)
    i_sep = int(np.argmin(np.abs(x - eq.sep)))
    j_sep = int(np.argmin(np.abs(y)))
    component = labels == labels[j_sep, i_sep] if labels[j_sep, i_sep] else np.zeros_like(z, bool)
    cell = (x[1] - x[0]) * (y[1] - y[0])
    v_dot = _vdot_field(f, dd, rr, vdot)
    area_vdot = float(np.count_nonzero(component & (v_dot <= 0.0))) * cell

    estimate = RoaEstimate(c=c, boundary=boundary.points, area=boundary.area,
                           area_vdot=area_vdot, kind=f.kind, sep=eq.sep, uep=eq.uep)
    logger.debug(f"ROA estimate: {estimate.summary()}")
    return estimate


def vdot_disagreement(f: EnergyFunction, t: np.ndarray, delta: np.ndarray,
                      delta_dot: np.ndarray) -> np.ndarray:
    """Numerical V-dot along a trajectory minus the printed modified expression."""
    numeric = numerical_vdot(f, t, delta, delta_dot)
    printed = vdot_modified(f, (np.asarray(delta), np.asarray(delta_dot)))
    return numeric - printed


@dataclass(frozen=True)
class BasinGrid:
    """Phase-plane grid of initial conditions."""

    delta_min: float
    delta_max: float
    delta_dot_min: float
    delta_dot_max: float
    n_delta: int = 41
    n_delta_dot: int = 41

    def __post_init__(self):
        for name in ("n_delta", "n_delta_dot"):
            n = getattr(self, name)
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ParameterError(f"{name} must be a positive integer, got {n}")
        if self.n_delta > 1 and not self.delta_max > self.delta_min:
            raise ParameterError("delta range is degenerate")
        if self.n_delta_dot > 1 and not self.delta_dot_max > self.delta_dot_min:
            raise ParameterError("delta_dot range is degenerate")

    @property
    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.n_delta)

    @property
    def delta_dots(self) -> np.ndarray:
        return np.linspace(self.delta_dot_min, self.delta_dot_max, self.n_delta_dot)

    @property
    def cell_area(self) -> float:
        dx = (self.delta_max - self.delta_min) / max(self.n_delta - 1, 1)
        dy = (self.delta_dot_max - self.delta_dot_min) / max(self.n_delta_dot - 1, 1)
        return dx * dy


@dataclass(frozen=True)
class BasinMap:
    """Verdict of every grid cell; verdicts[j, i] belongs to (deltas[i], delta_dots[j])."""

    grid: BasinGrid
    verdicts: np.ndarray

    @property
    def stable_mask(self) -> np.ndarray:
        return self.verdicts == VerdictKind.STABLE.value

    @property
    def stable_fraction(self) -> float:
        return float(np.mean(self.stable_mask))

    @property
    def stable_area(self) -> float:
        return float(np.count_nonzero(self.stable_mask)) * self.grid.cell_area

    def rows(self):
        """(delta0, delta_dot0, verdict) per cell, delta_dot major."""
        for j, rate in enumerate(self.grid.delta_dots):
            for i, delta in enumerate(self.grid.deltas):
                yield float(delta), float(rate), str(self.verdicts[j, i])

    def summary(self) -> str:
        counts = {k.value: int(np.count_nonzero(self.verdicts == k.value)) for k in VerdictKind}
        return " ".join(f"{k}={v}" for k, v in counts.items())


def classify_block(plant: Plant, params: PlantParams, events: Sequence[TimedEvent],
                   cfg: StepConfig, delta0: np.ndarray, delta_dot0: np.ndarray,
                   eq: Optional[Equilibria], angle_tol: float = 0.01,
                   rate_tol: float = 0.01, sustain: float = 0.2) -> np.ndarray:
    """
    Verdicts of many initial conditions integrated as one stacked state.

    Follows detect_loss_of_sync (no resynchronization) cell by cell, or
    detect_drift when eq is None; the run stops once every cell is decided.
    """
    n = len(delta0)
    p0 = initial_params(params, events)
    y = plant.initial_block(p0, delta0, delta_dot0)
    if eq is not None and eq.exists:
        shift = TWO_PI * np.round((delta0 - eq.sep) / TWO_PI)
        sep_b, uep_b = eq.sep + shift, eq.uep + shift
    else:
        sep_b = uep_b = None

    slip_t = np.full(n, np.nan)
    settle_t = np.full(n, np.nan)
    run_start = np.full(n, np.nan)
    with np.errstate(all="ignore"):
        for t, p, state in march(plant, p0, y, events, cfg, check=False):
            d, dd = plant.phase_point(p, state)
            d = np.broadcast_to(np.asarray(d, dtype=float), (n,))
            dd = np.broadcast_to(np.asarray(dd, dtype=float), (n,))
            finite = np.isfinite(d) & np.isfinite(dd)
            if sep_b is None:
                escaped = ~finite | (np.abs(d - delta0) > TWO_PI)
                settled = finite & (np.abs(dd) < rate_tol)
            else:
                escaped = (~finite
                           | ((d >= uep_b) & (dd > 0.0))
                           | ((d <= uep_b - TWO_PI) & (dd < 0.0))
                           | (np.abs(d - sep_b) > TWO_PI))
                settled = finite & (np.abs(d - sep_b) < angle_tol) & (np.abs(dd) < rate_tol)
            slip_t = np.where(escaped & np.isnan(slip_t), t, slip_t)
            run_start = np.where(settled, np.where(np.isnan(run_start), t, run_start), np.nan)
            reached = settled & (t - run_start >= sustain - EVENT_SNAP) & np.isnan(settle_t)
            settle_t = np.where(reached, run_start, settle_t)
            if np.all(~np.isnan(slip_t) | ~np.isnan(settle_t)):
                break

    slipped = ~np.isnan(slip_t) & (np.isnan(settle_t) | (slip_t < settle_t))
    out = np.full(n, VerdictKind.UNDETERMINED.value, dtype=object)
    out[~np.isnan(settle_t)] = VerdictKind.STABLE.value
    out[slipped] = VerdictKind.POLE_SLIP.value
    return out


def _basin_block(job):
    return classify_block(*job)


@instrumented("stability")
def basin_oracle(model, params: PlantParams, grid: BasinGrid,
                 cfg: StepConfig = StepConfig(dt=1e-3, t_end=5.0),
                 events: Sequence[TimedEvent] = (), jobs: int = 1,
                 eq: Optional[Equilibria] = None) -> BasinMap:
    """
    Simulate every grid cell and record its synchronization verdict.

    Cells are judged against eq, by default the equilibria of the parameters in
    force after the last event. Cells are integrated in fixed blocks of
    BASIN_BLOCK stacked states fanned out over jobs worker processes and merged by
    block index, so the map does not depend on the worker count.
    """
    plant = model if isinstance(model, Plant) else Plant(model)
    if jobs < 1:
        raise ParameterError(f"jobs must be at least 1, got {jobs}")
    if eq is None:
        final = params
        for ev in events:
            final = apply_changes(final, ev.changes)
        eq = plant.equilibria(final)
    dd, rr = np.meshgrid(grid.deltas, grid.delta_dots)
    flat_d, flat_r = dd.ravel(), rr.ravel()
    blocks = [
        (plant, params, tuple(events), cfg, flat_d[s:s + BASIN_BLOCK], flat_r[s:s + BASIN_BLOCK],
         eq if eq.exists else None)
        for s in range(0, len(flat_d), BASIN_BLOCK)
    ]
    logger.debug(f"Basin: {len(flat_d)} cells in {len(blocks)} blocks on {jobs} workers")
    if jobs == 1 or len(blocks) == 1:
        results = [_basin_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_basin_block, blocks))
    verdicts = np.concatenate(results).reshape(dd.shape)
    return BasinMap(grid=grid, verdicts=verdicts)


def roa_basin_grid(est: RoaEstimate, n: int = 41, pad: float = 0.1) -> BasinGrid:
    """Basin grid covering an ROA estimate's bounding box with a relative pad."""
    lo = est.boundary.min(axis=0)
    hi = est.boundary.max(axis=0)
    span = hi - lo
    return BasinGrid(float(lo[0] - pad * span[0]), float(hi[0] + pad * span[0]),
                     float(lo[1] - pad * span[1]), float(hi[1] + pad * span[1]), n, n)


__all__ = [
    "EacResult",
    "RoaEstimate",
    "BasinGrid",
    "BasinMap",
    "Equilibria",
    "EnergyFunction",
    "EnergyKind",
    "find_equilibria",
    "swing_equilibria",
    "energy",
    "energy_function",
    "vdot_modified",
    "vdot_classic",
    "flow_vdot",
    "numerical_vdot",
    "vdot_disagreement",
    "eac_gfl",
    "eac_gfm",
    "critical_clearing",
    "estimate_roa",
    "basin_oracle",
    "classify_block",
    "roa_basin_grid",
]
