"""
Right-hand sides of the converter synchronization models.

Three families are provided:

1. The full SRF-PLL model of a grid-following converter, state (delta, x) with x
   the PLL integrator output, including the PCC voltage algebra under a weak grid.
2. The generic second-order swing form J_eq*delta'' = P0_eq - D_eq*delta' - Pem_eq*sin(delta)
   shared by both control modes. The GFL mapping carries an angle-dependent damping.
3. The first-order reductions obtained with k_i = 0 (GFL) or J = 0 (GFM).

Every evaluator accepts scalars or numpy arrays for the angle and rate so the same
code integrates single trajectories and whole grids of initial conditions.
"""

import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional, Tuple, Union

import numpy as np

from .errors import (
    NonPositiveInertia,
    ParameterError,
    SingularAlgebraicLoop,
    ZeroDamping,
    ZeroIntegralGain,
)
from .params import CurrentSetpoint, GflParams, GfmParams, GridParams

logger = logging.getLogger("syncarena.model")

# |1 - k_p*l_g*i_d| below this makes the implicit PLL frequency loop unsolvable
SINGULAR_LOOP_TOLERANCE = 1e-9

ArrayLike = Union[float, np.ndarray]


class ControlMode(Enum):
    """Synchronization principle of the converter."""
    GFL = auto()
    GFM = auto()


def parse_mode(mode: Union[str, ControlMode]) -> ControlMode:
    """Accept a ControlMode or its case-insensitive name."""
    if isinstance(mode, ControlMode):
        return mode
    try:
        return ControlMode[str(mode).strip().upper()]
    except KeyError:
        raise ParameterError(f"unknown control mode {mode!r} (expected 'gfl' or 'gfm')")


@dataclass(frozen=True)
class SwingState:
    """Phase-plane point: unwrapped angle (rad) and its rate (rad/s)."""

    delta: float
    delta_dot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta, self.delta_dot], dtype=float)

    @property
    def omega_offset(self) -> float:
        """omega - omega_0 of the synchronizing unit."""
        return self.delta_dot


@dataclass(frozen=True)
class ConstantDamping:
    """Damping that does not depend on the angle."""

    d_eq: float

    def value(self, delta: ArrayLike) -> ArrayLike:
        if isinstance(delta, np.ndarray):
            return np.full_like(delta, self.d_eq, dtype=float)
        return self.d_eq


@dataclass(frozen=True)
class GflAngleDependentDamping:
    """d_eq(delta) = k_p*v_g*cos(delta)/k_i - l_g*i_d of the PLL swing mapping."""

    k_p: float
    k_i: float
    v_g: float
    l_g: float
    i_d: float

    def value(self, delta: ArrayLike) -> ArrayLike:
        return self.k_p * self.v_g * np.cos(delta) / self.k_i - self.l_g * self.i_d


Damping = Union[ConstantDamping, GflAngleDependentDamping]


@dataclass(frozen=True)
class EquivalentSwing:
    """Coefficients of the generic second-order model of both control modes."""

    j_eq: float
    p0_eq: float
    pem_eq: float
    damping: Damping

    def d_eq(self, delta: ArrayLike) -> ArrayLike:
        return self.damping.value(delta)

    def frozen_damping(self, delta: float) -> float:
        """Damping evaluated at one angle (used where a constant D is required)."""
        return float(self.damping.value(float(delta)))


def _unpack(state) -> Tuple[ArrayLike, ArrayLike]:
    if isinstance(state, SwingState):
        return state.delta, state.delta_dot
    return state[0], state[1]


def pcc_voltage(grid: GridParams, delta: ArrayLike, omega_pll: ArrayLike,
                cur: CurrentSetpoint) -> Tuple[ArrayLike, ArrayLike]:
    """
    dq components of the PCC voltage in the PLL frame.

    Rotation of the grid voltage into the PLL frame plus the drop across the grid
    impedance, with the inductive term taken at the PLL frequency.

    Returns:
        Tuple (v_pccd, v_pccq) in p.u.
    """
    wl = omega_pll * grid.l_g
    v_d = grid.v_g * np.cos(delta) + grid.r_g * cur.i_d - wl * cur.i_q
    v_q = -grid.v_g * np.sin(delta) + wl * cur.i_d + grid.r_g * cur.i_q
    return v_d, v_q


def _loop_gain(k_p: float, grid: GridParams, cur: CurrentSetpoint) -> float:
    a = 1.0 - k_p * grid.l_g * cur.i_d
    if abs(a) < SINGULAR_LOOP_TOLERANCE:
        raise SingularAlgebraicLoop(
            f"1 - k_p*l_g*i_d = {a:.3e} is singular (k_p={k_p}, l_g={grid.l_g}, i_d={cur.i_d})"
        )
    return a


def gfl_full_rhs(gfl: GflParams, grid: GridParams, cur: CurrentSetpoint, state,
                 resolve_loop: bool = True) -> np.ndarray:
    """
    Right-hand side of the full SRF-PLL model.

    The PLL output frequency omega_pll = omega_0 + delta_dot appears inside the
    inductive drop of v_pccq; with resolve_loop the implicit equation is solved
    exactly, otherwise omega_pll is approximated by omega_0 in that term.

    Args:
        gfl: PLL gains
        grid: Grid parameters
        cur: Current setpoint
        state: (delta, x) with x the integrator output in rad/s
        resolve_loop: Solve the implicit frequency loop analytically

    Returns:
        Array (delta_dot, x_dot)

    Raises:
        SingularAlgebraicLoop: If |1 - k_p*l_g*i_d| < 1e-9
    """
    delta, x = state[0], state[1]
    k_p, k_i = gfl.kp_eff, gfl.ki_eff
    _, v_q0 = pcc_voltage(grid, delta, grid.omega_0, cur)
    if resolve_loop:
        a = _loop_gain(k_p, grid, cur)
        delta_dot = (k_p * v_q0 + x) / a
        v_q = v_q0 + grid.l_g * cur.i_d * delta_dot
    else:
        delta_dot = k_p * v_q0 + x
        v_q = v_q0
    return np.array([delta_dot, k_i * v_q])


def integrator_state_for(gfl: GflParams, grid: GridParams, cur: CurrentSetpoint,
                         delta: float, delta_dot: float) -> float:
    """Integrator output x that makes the full PLL model move at delta_dot."""
    k_p = gfl.kp_eff
    a = _loop_gain(k_p, grid, cur)
    _, v_q0 = pcc_voltage(grid, delta, grid.omega_0, cur)
    return delta_dot * a - k_p * v_q0


def gfl_to_swing(gfl: GflParams, grid: GridParams, cur: CurrentSetpoint) -> EquivalentSwing:
    """
    Equivalent swing coefficients of the PLL-synchronized converter.

    Raises:
        ZeroIntegralGain: If k_i = 0 (use the first-order model instead)
        NonPositiveInertia: If 1 - k_p*l_g*i_d <= 0
    """
    k_p, k_i = gfl.kp_eff, gfl.ki_eff
    if k_i == 0.0:
        raise ZeroIntegralGain("k_i = 0 has no swing form; use first_order_rhs")
    a = 1.0 - k_p * grid.l_g * cur.i_d
    if a <= 0.0:
        raise NonPositiveInertia(f"1 - k_p*l_g*i_d = {a} gives a non-positive inertia")
    return EquivalentSwing(
        j_eq=a / k_i,
        p0_eq=grid.omega_0 * grid.l_g * cur.i_d + grid.r_g * cur.i_q,
        pem_eq=grid.v_g,
        damping=GflAngleDependentDamping(
            k_p=k_p, k_i=k_i, v_g=grid.v_g, l_g=grid.l_g, i_d=cur.i_d
        ),
    )


def gfm_pem(gfm: GfmParams, grid: GridParams, pem: Optional[float] = None) -> float:
    """Electrical power amplitude of the VSG in the units of gfm.power_base."""
    if pem is None:
        pem = grid.v_pcc * grid.v_g / grid.x_g
    return pem * gfm.power_base


def gfm_to_swing(gfm: GfmParams, grid: GridParams, pem: Optional[float] = None,
                 include_governor: bool = False) -> EquivalentSwing:
    """
    Swing coefficients of the VSG.

    Args:
        gfm: VSG parameters
        grid: Grid parameters (v_pcc, v_g and x_g set the power amplitude)
        pem: Optional per-unit power amplitude overriding v_pcc*v_g/x_g
        include_governor: Add the governor gain k_omega to the damping

    Returns:
        EquivalentSwing with constant damping
    """
    d = gfm.total_damping if include_governor else gfm.d
    return EquivalentSwing(
        j_eq=gfm.j,
        p0_eq=gfm.p_0 * gfm.power_base,
        pem_eq=gfm_pem(gfm, grid, pem),
        damping=ConstantDamping(d),
    )


def swing_rhs(sw: EquivalentSwing, state) -> np.ndarray:
    """
    Right-hand side of the generic swing model.

    Returns:
        Array (delta_dot, delta_ddot)
    """
    delta, delta_dot = _unpack(state)
    delta_ddot = (sw.p0_eq - sw.d_eq(delta) * delta_dot - sw.pem_eq * np.sin(delta)) / sw.j_eq
    return np.array([delta_dot, delta_ddot])


def first_order_rhs(mode: Union[str, ControlMode], params, delta: ArrayLike,
                    grid: Optional[GridParams] = None,
                    cur: Optional[CurrentSetpoint] = None,
                    pem: Optional[float] = None) -> ArrayLike:
    """
    First-order reductions of both control modes.

    GFL (k_i = 0): delta_dot = k_p*v_pccq with the frequency loop resolved, which is
    k_p*(r_g*i_q - v_g*sin(delta)) when i_d = 0.
    GFM (J = 0): delta_dot = (p_0 - pem*sin(delta))/d.

    Raises:
        ParameterError: If the inputs needed by the mode are missing
        ZeroDamping: For the GFM mode with d = 0
    """
    mode = parse_mode(mode)
    if mode is ControlMode.GFL:
        if grid is None or cur is None:
            raise ParameterError("the GFL reduction needs grid and current parameters")
        k_p = params.kp_eff
        a = _loop_gain(k_p, grid, cur)
        _, v_q0 = pcc_voltage(grid, delta, grid.omega_0, cur)
        return k_p * v_q0 / a

    if params.d == 0.0:
        raise ZeroDamping("the first-order GFM reduction needs d > 0")
    if pem is None:
        if grid is None:
            raise ParameterError("the GFM reduction needs grid parameters or pem")
        pem = grid.v_pcc * grid.v_g / grid.x_g
    return (params.p_0 - pem * np.sin(delta)) * params.power_base / params.d
