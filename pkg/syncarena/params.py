"""
Physical parameter bundles of the single-converter infinite-bus system.

All bundles are frozen dataclasses: they are validated once at construction and
mutated only through dataclasses.replace (which re-runs validation). Powers,
voltages and currents are per-unit; the inductance entering the PCC algebra is
l_g = x_g / omega_0.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence

from .errors import ParameterError

logger = logging.getLogger("syncarena.model")

OMEGA_0 = 100.0 * math.pi

# Tolerance on |i_dq| <= i_rated
CURRENT_LIMIT_TOLERANCE = 1e-9


def _validate_finite(name: str, value: Any) -> float:
    """Validate that value is a finite real number."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{name} must be a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value


def _validate_positive(name: str, value: Any) -> float:
    value = _validate_finite(name, value)
    if value <= 0.0:
        raise ParameterError(f"{name} must be positive, got {value}")
    return value


def _validate_non_negative(name: str, value: Any) -> float:
    value = _validate_finite(name, value)
    if value < 0.0:
        raise ParameterError(f"{name} must be non-negative, got {value}")
    return value


@dataclass(frozen=True)
class PerUnitBase:
    """Base quantities of the per-unit system (50 kVA, 311 V peak by default)."""

    s_n: float = 0.05e6
    v_n_peak: float = 311.0
    omega_0: float = OMEGA_0
    i_n: float = 107.0

    def __post_init__(self):
        for name in ("s_n", "v_n_peak", "omega_0", "i_n"):
            _validate_positive(name, getattr(self, name))

    @property
    def z_base(self) -> float:
        """Base impedance in ohms for peak-voltage, three-phase power scaling."""
        return 1.5 * self.v_n_peak ** 2 / self.s_n


@dataclass(frozen=True)
class GridParams:
    """
    Grid seen from the PCC.

    x_g and r_g are the effective single-line values used by the reduced model
    (transformer and parallel lines already combined, see combine_lines). x_t and
    x_f are carried for reporting only.
    """

    r_g: float = 0.025
    x_g: float = 0.45
    v_g: float = 1.0
    x_t: float = 0.2
    x_f: float = 0.15
    v_pcc: float = 1.05
    omega_0: float = OMEGA_0

    def __post_init__(self):
        _validate_non_negative("r_g", self.r_g)
        _validate_positive("x_g", self.x_g)
        _validate_non_negative("v_g", self.v_g)
        _validate_non_negative("x_t", self.x_t)
        _validate_non_negative("x_f", self.x_f)
        _validate_non_negative("v_pcc", self.v_pcc)
        _validate_positive("omega_0", self.omega_0)

    @property
    def l_g(self) -> float:
        """Grid inductance in the p.u. convention of the PCC algebra."""
        return self.x_g / self.omega_0


def combine_lines(x_lines: Sequence[float], r_lines: Sequence[float], x_t: float = 0.0):
    """
    Combine parallel lines plus a series transformer into one effective branch.

    Args:
        x_lines: Reactance of each line in service (p.u.)
        r_lines: Resistance of each line in service (p.u.)
        x_t: Transformer leakage reactance in series (p.u.)

    Returns:
        Tuple (x_g, r_g) of the effective branch.

    Raises:
        ParameterError: If no line is in service or the sequences differ in length
    """
    if not x_lines:
        raise ParameterError("at least one line must be in service")
    if len(x_lines) != len(r_lines):
        raise ParameterError(
            f"x_lines and r_lines differ in length ({len(x_lines)} vs {len(r_lines)})"
        )
    x_par = 1.0 / sum(1.0 / _validate_positive("x_line", x) for x in x_lines)
    if any(r == 0.0 for r in r_lines):
        r_par = 0.0
    else:
        r_par = 1.0 / sum(1.0 / _validate_positive("r_line", r) for r in r_lines)
    return x_t + x_par, r_par


@dataclass(frozen=True)
class CurrentSetpoint:
    """dq current reference held by the (quasi-steady) inner current loop."""

    i_d: float = 1.0
    i_q: float = 0.0
    i_rated: float = 1.0

    def __post_init__(self):
        _validate_finite("i_d", self.i_d)
        _validate_finite("i_q", self.i_q)
        _validate_positive("i_rated", self.i_rated)
        magnitude = math.hypot(self.i_d, self.i_q)
        if magnitude > self.i_rated + CURRENT_LIMIT_TOLERANCE:
            raise ParameterError(
                f"current magnitude {magnitude} exceeds i_rated {self.i_rated}"
            )


@dataclass(frozen=True)
class GflParams:
    """
    SRF-PLL gains of the grid-following converter.

    k_p and k_i are stated per unit of the voltage they act on; voltage_base
    converts gains stated per volt to per-unit gains. k_vq is
    the stability-enhancement gain of the adaptive proportional law; when left
    unset it defaults to k_p / 0.5 so the adaptive gain reaches zero at
    v_pccq = -0.5 p.u.
    """

    k_p: float = 0.3
    k_i: float = 4.0
    k_vq: Optional[float] = None
    voltage_base: float = 1.0

    def __post_init__(self):
        _validate_non_negative("k_p", self.k_p)
        _validate_non_negative("k_i", self.k_i)
        if self.k_vq is not None:
            _validate_non_negative("k_vq", self.k_vq)
        _validate_positive("voltage_base", self.voltage_base)

    @property
    def kp_eff(self) -> float:
        return self.k_p * self.voltage_base

    @property
    def ki_eff(self) -> float:
        return self.k_i * self.voltage_base

    @property
    def kvq_eff(self) -> float:
        k_vq = self.k_p / 0.5 if self.k_vq is None else self.k_vq
        return k_vq * self.voltage_base


@dataclass(frozen=True)
class GfmParams:
    """
    VSG parameters of the grid-forming converter.

    j, d, j_0, k_omega and k_lin are expressed against power_base watts per p.u.
    (power_base = 1 means pure per-unit); p_0 is always per-unit.
    """

    j: float = 300.0
    d: float = 100.0
    p_0: float = 0.8
    j_0: Optional[float] = None
    n: float = 5.0
    k_omega: float = 0.0
    k_lin: float = 0.0
    power_base: float = 1.0

    def __post_init__(self):
        _validate_positive("j", self.j)
        _validate_non_negative("d", self.d)
        _validate_finite("p_0", self.p_0)
        if self.j_0 is not None:
            _validate_positive("j_0", self.j_0)
        n = _validate_finite("n", self.n)
        if n <= 1.0:
            raise ParameterError(f"n must be greater than 1, got {n}")
        _validate_non_negative("k_omega", self.k_omega)
        _validate_finite("k_lin", self.k_lin)
        _validate_positive("power_base", self.power_base)

    @property
    def base_inertia(self) -> float:
        """J_0 of the adaptive laws (falls back to j)."""
        return self.j if self.j_0 is None else self.j_0

    @property
    def total_damping(self) -> float:
        """D + k_omega of the stability-enhanced law."""
        return self.d + self.k_omega


def with_changes(bundle, **changes):
    """Return a validated copy of a parameter bundle with fields replaced."""
    logger.debug("Replacing %s fields: %s", type(bundle).__name__, changes)
    return replace(bundle, **changes)


__all__ = [
    "OMEGA_0",
    "PerUnitBase",
    "GridParams",
    "CurrentSetpoint",
    "GflParams",
    "GfmParams",
    "combine_lines",
    "with_changes",
]
