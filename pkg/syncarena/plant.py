"""
Controller-variant plants.

A plant turns a controller variant plus a parameter bundle into an integrable
state vector, its right-hand side and the recorded controller internals. The
PLL variants keep the integrator output x as state, so a current or voltage step
makes delta_dot jump through the proportional path exactly as in the full model.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from .control import (
    Variant,
    adaptive_kp,
    enhanced_gfm_rhs,
    gfm_state_inertia,
    linear_inertia_gfm_rhs,
)
from .errors import ParameterError, SingularAlgebraicLoop, SyncArenaError
from .lyapunov import EnergyFunction, EnergyKind, energy, find_equilibria
from .models import (
    SwingState,
    first_order_rhs,
    gfl_full_rhs,
    gfm_pem,
    gfm_to_swing,
    integrator_state_for,
    pcc_voltage,
    swing_rhs,
    gfl_to_swing,
)
from .params import CurrentSetpoint, GflParams, GfmParams, GridParams

logger = logging.getLogger("syncarena.integrate")

_SECTIONS = ("grid", "current", "gfl", "gfm")
_FLAGS = ("pem", "pll_frozen")


@dataclass(frozen=True)
class PlantParams:
    """Everything an event may overwrite: grid, current setpoint and controller gains."""

    grid: GridParams = field(default_factory=GridParams)
    current: CurrentSetpoint = field(default_factory=CurrentSetpoint)
    gfl: GflParams = field(default_factory=GflParams)
    gfm: GfmParams = field(default_factory=GfmParams)
    pem: Optional[float] = None
    pll_frozen: bool = False


def resolve_key(key: str) -> Tuple[Optional[str], str]:
    """Split an overwrite key into (section, field); section is None for the bundle flags."""
    key = key.strip()
    if "." in key:
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ParameterError(f"unknown parameter section {section!r} in {key!r}")
        return section, name
    if key in _FLAGS:
        return None, key
    owners = [s for s in _SECTIONS if key in _section_fields(s)]
    if not owners:
        raise ParameterError(f"unknown parameter {key!r}")
    if len(owners) > 1:
        raise ParameterError(f"parameter {key!r} is ambiguous, qualify it as one of "
                             + ", ".join(f"{o}.{key}" for o in owners))
    return owners[0], key


SECTION_TYPES = {"grid": GridParams, "current": CurrentSetpoint, "gfl": GflParams, "gfm": GfmParams}


def _section_fields(section: str):
    return SECTION_TYPES[section].__dataclass_fields__.keys()


def apply_changes(params: PlantParams, changes: Mapping[str, Any]) -> PlantParams:
    """
    Overwrite fields of a bundle.

    Keys are 'section.field' or bare field names that are unique across the
    grid/current/gfl/gfm sections; 'pem' and 'pll_frozen' address the bundle itself.
    Fields that are validated together (e.g. i_d, i_q and i_rated) are replaced
    in one step per section.

    Raises:
        ParameterError: For unknown or ambiguous keys and invalid values
    """
    grouped: Dict[Optional[str], Dict[str, Any]] = {}
    for key, value in changes.items():
        section, name = resolve_key(key)
        if section is not None and name not in _section_fields(section):
            raise ParameterError(f"{section} has no field {name!r}")
        grouped.setdefault(section, {})[name] = value
    updates: Dict[str, Any] = dict(grouped.pop(None, {}))
    for section, values in grouped.items():
        updates[section] = replace(getattr(params, section), **values)
    return replace(params, **updates)


class Plant:
    """Integrable form of one controller variant."""

    def __init__(self, variant):
        self.variant = Variant.parse(variant)

    def __repr__(self):
        return f"Plant({self.variant.value})"

    @property
    def has_integrator(self) -> bool:
        return self.variant in (Variant.PLL_ORIGINAL, Variant.PLL_FROZEN, Variant.PLL_COMPENSATING)

    @property
    def first_order(self) -> bool:
        return self.variant in (Variant.PLL_ENHANCED, Variant.PLL_FIRST_ORDER,
                                Variant.VSG_FIRST_ORDER)

    def gfm_pem_pu(self, params: PlantParams) -> float:
        if params.pem is not None:
            return params.pem
        grid = params.grid
        return grid.v_pcc * grid.v_g / grid.x_g

    def initial_vector(self, params: PlantParams, init: SwingState) -> np.ndarray:
        """State vector matching a phase-plane point."""
        return self.initial_block(params, init.delta, init.delta_dot)

    def initial_block(self, params: PlantParams, delta, delta_dot) -> np.ndarray:
        """State vectors of many phase-plane points, stacked along the second axis."""
        if self.first_order:
            return np.array([delta], dtype=float)
        if self.has_integrator:
            x = integrator_state_for(params.gfl, params.grid, params.current, delta, delta_dot)
            return np.array([delta, x], dtype=float)
        return np.array([delta, delta_dot], dtype=float)

    def _enhanced_pll_rate(self, params: PlantParams, delta):
        grid, cur, gfl = params.grid, params.current, params.gfl
        _, v_q0 = pcc_voltage(grid, delta, grid.omega_0, cur)
        kp_ad = adaptive_kp(gfl.kp_eff, gfl.kvq_eff, v_q0)
        a = 1.0 - kp_ad * grid.l_g * cur.i_d
        if np.any(np.abs(a) < 1e-9):
            raise SingularAlgebraicLoop("adaptive PLL frequency loop is singular")
        return kp_ad * v_q0 / a, kp_ad, v_q0

    def rhs(self, params: PlantParams, y: np.ndarray) -> np.ndarray:
        v = self.variant
        if self.has_integrator:
            if v is Variant.PLL_FROZEN and params.pll_frozen:
                return np.zeros_like(y)
            return gfl_full_rhs(params.gfl, params.grid, params.current, y)
        if v is Variant.PLL_ENHANCED:
            rate, _, _ = self._enhanced_pll_rate(params, y[0])
            return np.array([rate])
        if v is Variant.PLL_FIRST_ORDER:
            return np.array([first_order_rhs("gfl", params.gfl, y[0], params.grid, params.current)])
        pem = self.gfm_pem_pu(params)
        if v is Variant.VSG_FIRST_ORDER:
            return np.array([first_order_rhs("gfm", params.gfm, y[0], pem=pem)])
        if v is Variant.VSG_ENHANCED:
            return enhanced_gfm_rhs(params.gfm, pem, y)
        if v is Variant.VSG_LINEAR_INERTIA:
            return linear_inertia_gfm_rhs(params.gfm, pem, y)
        return swing_rhs(gfm_to_swing(params.gfm, params.grid, pem=pem), y)

    def phase_point(self, params: PlantParams, y: np.ndarray):
        """(delta, delta_dot) of a state vector or of a block of stacked states."""
        if self.first_order or self.has_integrator:
            return y[0], self.rhs(params, y)[0]
        return y[0], y[1]

    def swing_state(self, params: PlantParams, y: np.ndarray) -> SwingState:
        """Phase-plane point of a state vector."""
        delta, delta_dot = self.phase_point(params, y)
        return SwingState(float(delta), float(delta_dot))

    def equivalent_swing(self, params: PlantParams):
        """Swing coefficients in force, or None for first-order variants."""
        if self.first_order:
            return None
        if self.variant.is_gfl:
            try:
                return gfl_to_swing(params.gfl, params.grid, params.current)
            except SyncArenaError:
                return None
        include_governor = self.variant is not Variant.VSG_ORIGINAL
        return gfm_to_swing(params.gfm, params.grid, pem=self.gfm_pem_pu(params),
                            include_governor=include_governor)

    def equilibria(self, params: PlantParams):
        """Equilibrium pair of the window's parameters (both variants families)."""
        if self.variant.is_gfl:
            grid, cur = params.grid, params.current
            p0 = grid.omega_0 * grid.l_g * cur.i_d + grid.r_g * cur.i_q
            return find_equilibria(p0, grid.v_g)
        base = params.gfm.power_base
        return find_equilibria(params.gfm.p_0 * base,
                               gfm_pem(params.gfm, params.grid, self.gfm_pem_pu(params)))

    def window_energy(self, params: PlantParams) -> Optional[EnergyFunction]:
        """Classic energy function of the window, if the window has a swing form and an SEP."""
        sw = self.equivalent_swing(params)
        if sw is None:
            return None
        eq = find_equilibria(sw.p0_eq, sw.pem_eq)
        if not eq.exists:
            return None
        return EnergyFunction(kind=EnergyKind.CLASSIC, j=sw.j_eq, d=sw.frozen_damping(eq.sep),
                              p_0=sw.p0_eq, pem=sw.pem_eq, sep=eq.sep)

    def observe(self, params: PlantParams, y: np.ndarray,
                energy_fn: Optional[EnergyFunction] = None) -> Tuple[float, ...]:
        """
        Recorded internals at a state.

        Returns:
            Tuple (delta, delta_dot, v_pccq, j_eff, kp_eff, energy); quantities a
            variant does not have are NaN.
        """
        nan = math.nan
        s = self.swing_state(params, y)
        v_pccq = j_eff = kp_eff = nan
        if self.variant.is_gfl:
            grid, cur, gfl = params.grid, params.current, params.gfl
            _, v_pccq = pcc_voltage(grid, s.delta, grid.omega_0 + s.delta_dot, cur)
            if self.variant is Variant.PLL_ENHANCED:
                _, kp_eff, _ = self._enhanced_pll_rate(params, s.delta)
            elif self.variant is Variant.PLL_FROZEN and params.pll_frozen:
                kp_eff = 0.0
            else:
                kp_eff = gfl.kp_eff
            if self.has_integrator and gfl.ki_eff > 0.0:
                j_eff = (1.0 - gfl.kp_eff * grid.l_g * cur.i_d) / gfl.ki_eff
        else:
            pem = self.gfm_pem_pu(params)
            j_eff = gfm_state_inertia(params.gfm, pem, s, self.variant)
        e = float(energy(energy_fn, s)) if energy_fn is not None else nan
        return s.delta, s.delta_dot, float(v_pccq), float(j_eff), float(kp_eff), e
