"""
Controller laws: adaptive inertia, governor damping, adaptive PLL gain, frozen PLL
and the impedance-compensating current injection.
"""

import logging
import math
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .errors import ParameterError
from .models import ArrayLike, SwingState, _unpack
from .params import CurrentSetpoint, GfmParams, GridParams

logger = logging.getLogger("syncarena.model")

# Floor of the linear adaptive-inertia law as a fraction of J_0
LINEAR_INERTIA_FLOOR = 0.01


class Variant(Enum):
    """Controller variants selectable from configs and the CLI."""
    PLL_ORIGINAL = "pll-original"
    PLL_ENHANCED = "pll-enhanced"
    PLL_FROZEN = "pll-frozen"
    PLL_FIRST_ORDER = "pll-first-order"
    PLL_COMPENSATING = "pll-compensating"
    VSG_ORIGINAL = "vsg-original"
    VSG_ENHANCED = "vsg-enhanced"
    VSG_FIRST_ORDER = "vsg-first-order"
    VSG_LINEAR_INERTIA = "vsg-linear-inertia"

    @property
    def is_gfl(self) -> bool:
        return self.value.startswith("pll-")

    @classmethod
    def parse(cls, name: Union[str, "Variant"]) -> "Variant":
        if isinstance(name, Variant):
            return name
        for variant in cls:
            if variant.value == str(name).strip().lower():
                return variant
        names = ", ".join(v.value for v in cls)
        raise ParameterError(f"unknown controller variant {name!r} (expected one of: {names})")


def _like_input(result, *inputs):
    if any(isinstance(x, np.ndarray) for x in inputs):
        return result
    return float(result)


def adaptive_inertia_bang(j_0: float, n: float, omega_dev: ArrayLike,
                          omega_rate: ArrayLike) -> ArrayLike:
    """
    Bang-bang inertia: n*J_0 while (omega - omega_0)*d(omega)/dt > 0, J_0 otherwise.

    The switching surface itself (product exactly zero) takes J_0.
    """
    out = np.where(np.multiply(omega_dev, omega_rate) > 0.0, n * j_0, j_0)
    return _like_input(out, omega_dev, omega_rate)


def adaptive_inertia_linear(j_0: float, k_lin: float, omega_dev: ArrayLike,
                            omega_rate: ArrayLike) -> ArrayLike:
    """Linear inertia law J_0 + k*(omega - omega_0)*d(omega)/dt, floored at 1% of J_0."""
    j = j_0 + k_lin * np.multiply(omega_dev, omega_rate)
    out = np.maximum(j, LINEAR_INERTIA_FLOOR * j_0)
    return _like_input(out, omega_dev, omega_rate)


def _gfm_numerator(gfm: GfmParams, pem: float, delta: ArrayLike, delta_dot: ArrayLike):
    base = gfm.power_base
    return gfm.p_0 * base - gfm.total_damping * delta_dot - pem * base * np.sin(delta)


def enhanced_gfm_inertia(gfm: GfmParams, pem: float, state) -> ArrayLike:
    """
    Effective inertia J_ad of the stability-enhanced VSG at a state.

    The sign of d(omega)/dt does not depend on the (positive) inertia, so the
    switching test uses the acceleration numerator directly.
    """
    delta, delta_dot = _unpack(state)
    rate = _gfm_numerator(gfm, pem, delta, delta_dot) / gfm.base_inertia
    return adaptive_inertia_bang(gfm.base_inertia, gfm.n, delta_dot, rate)


def enhanced_gfm_rhs(gfm: GfmParams, pem: float, state) -> np.ndarray:
    """
    Stability-enhanced VSG: J_ad*delta'' = P_0 - (D + k_omega)*delta' - Pem*sin(delta).

    Args:
        gfm: VSG parameters (j_0, n, d, k_omega, p_0, power_base)
        pem: Per-unit electrical power amplitude
        state: SwingState or (delta, delta_dot)

    Returns:
        Array (delta_dot, delta_ddot)
    """
    delta, delta_dot = _unpack(state)
    numerator = _gfm_numerator(gfm, pem, delta, delta_dot)
    j_ad = adaptive_inertia_bang(gfm.base_inertia, gfm.n, delta_dot, numerator)
    return np.array([delta_dot, numerator / j_ad])


def linear_inertia_gfm_inertia(gfm: GfmParams, pem: float, state) -> ArrayLike:
    """Effective inertia of the linear adaptive law, rate taken under J_0."""
    delta, delta_dot = _unpack(state)
    rate = _gfm_numerator(gfm, pem, delta, delta_dot) / gfm.base_inertia
    return adaptive_inertia_linear(gfm.base_inertia, gfm.k_lin, delta_dot, rate)


def linear_inertia_gfm_rhs(gfm: GfmParams, pem: float, state) -> np.ndarray:
    """VSG swing with the linear adaptive inertia law and governor damping."""
    delta, delta_dot = _unpack(state)
    numerator = _gfm_numerator(gfm, pem, delta, delta_dot)
    j = linear_inertia_gfm_inertia(gfm, pem, (delta, delta_dot))
    return np.array([delta_dot, numerator / j])


def adaptive_kp(k_p: float, k_vq: float, v_pccq: ArrayLike) -> ArrayLike:
    """
    Adaptive PLL proportional gain.

    0 below the knot -k_p/k_vq, k_p + k_vq*v_pccq between the knot and 0, and k_p
    for non-negative v_pccq. A zero k_vq disables the adaptation.
    """
    if k_vq <= 0.0:
        return _like_input(np.full_like(np.asarray(v_pccq, dtype=float), k_p), v_pccq)
    knot = -k_p / k_vq
    v = np.asarray(v_pccq, dtype=float)
    out = np.where(v >= 0.0, k_p, np.where(v <= knot, 0.0, k_p + k_vq * v))
    return _like_input(out, v_pccq)


def enhanced_pll_freq(omega_0: float, k_p: float, k_vq: float, v_pccq: ArrayLike) -> ArrayLike:
    """PLL output frequency omega_0 + k_p_ad(v_pccq)*v_pccq."""
    return omega_0 + adaptive_kp(k_p, k_vq, v_pccq) * v_pccq


def compensating_current(omega_0: float, l_g: float, r_g: float,
                         i_rated: float) -> CurrentSetpoint:
    """
    Current injection cancelling the drop on the grid impedance.

    i_q/i_d = -omega_0*l_g/r_g at magnitude i_rated, which makes P0_eq vanish and
    places the PLL equilibrium at delta = 0.

    Raises:
        ParameterError: If r_g or i_rated is not positive
    """
    if r_g <= 0.0:
        raise ParameterError(f"r_g must be positive for current compensation, got {r_g}")
    if i_rated <= 0.0:
        raise ParameterError(f"i_rated must be positive, got {i_rated}")
    ratio = omega_0 * l_g / r_g
    i_d = i_rated / math.sqrt(1.0 + ratio * ratio)
    i_q = -ratio * i_d
    logger.debug("Compensating current i_d=%.6f i_q=%.6f (ratio %.4f)", i_d, i_q, -ratio)
    return CurrentSetpoint(i_d=i_d, i_q=i_q, i_rated=i_rated)


def compensating_current_for(grid: GridParams, i_rated: float = 1.0) -> CurrentSetpoint:
    """compensating_current evaluated on a grid bundle."""
    return compensating_current(grid.omega_0, grid.l_g, grid.r_g, i_rated)


def gfm_state_inertia(gfm: GfmParams, pem: float, state: Union[SwingState, Tuple[float, float]],
                      variant: Variant) -> float:
    """Inertia in force for a GFM variant at a state; NaN for the first-order VSG."""
    if variant is Variant.VSG_ENHANCED:
        return float(enhanced_gfm_inertia(gfm, pem, state))
    if variant is Variant.VSG_LINEAR_INERTIA:
        return float(linear_inertia_gfm_inertia(gfm, pem, state))
    if variant is Variant.VSG_FIRST_ORDER:
        return math.nan
    return gfm.j
