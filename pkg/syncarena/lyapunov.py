"""
Equilibria and energy (Lyapunov) functions of the generic swing model.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import NoEquilibrium
from .models import ArrayLike, EquivalentSwing, _unpack

logger = logging.getLogger("syncarena.stability")


@dataclass(frozen=True)
class Equilibria:
    """Stable and unstable equilibrium angles of the first swing period."""

    sep: Optional[float]
    uep: Optional[float]

    @property
    def exists(self) -> bool:
        return self.sep is not None and self.uep is not None

    def require(self) -> "Equilibria":
        if not self.exists:
            raise NoEquilibrium("the swing system has no stable equilibrium point")
        return self

    def nearest_branch(self, delta: float) -> "Equilibria":
        """Shift both points by the multiple of 2*pi that puts the SEP nearest delta."""
        self.require()
        k = round((delta - self.sep) / (2.0 * math.pi))
        shift = 2.0 * math.pi * k
        return Equilibria(sep=self.sep + shift, uep=self.uep + shift)


def find_equilibria(p0_eq: float, pem_eq: float) -> Equilibria:
    """
    SEP/UEP pair of P0_eq = Pem_eq*sin(delta) with cos(SEP) > 0.

    Absence is returned as a value: both fields are None when Pem_eq <= 0 or
    |P0_eq/Pem_eq| > 1.
    """
    if pem_eq <= 0.0:
        return Equilibria(sep=None, uep=None)
    ratio = p0_eq / pem_eq
    if abs(ratio) > 1.0:
        logger.debug("No equilibrium: |P0/Pem| = %.4f > 1", abs(ratio))
        return Equilibria(sep=None, uep=None)
    sep = math.asin(ratio)
    return Equilibria(sep=sep, uep=math.pi - sep)


def swing_equilibria(sw: EquivalentSwing) -> Equilibria:
    return find_equilibria(sw.p0_eq, sw.pem_eq)


class EnergyKind(Enum):
    """Classic energy function, or the one carrying the D*|delta*delta_dot| term."""
    CLASSIC = "classic"
    MODIFIED = "modified"

    @classmethod
    def parse(cls, kind: Union[str, "EnergyKind"]) -> "EnergyKind":
        if isinstance(kind, EnergyKind):
            return kind
        return cls(str(kind).strip().lower())


@dataclass(frozen=True)
class EnergyFunction:
    """
    V(delta, delta_dot) = J*delta_dot^2/2 + (E_0 - P_0*delta - Pem*cos(delta)) [+ D*|delta*delta_dot|]

    E_0 is fixed by V(sep, 0) = 0. With shifted=True the nonsmooth term uses
    delta - sep instead of the absolute angle.
    """

    kind: EnergyKind
    j: float
    d: float
    p_0: float
    pem: float
    sep: float
    shifted: bool = False

    @property
    def e_0(self) -> float:
        return self.p_0 * self.sep + self.pem * math.cos(self.sep)

    def _angle(self, delta: ArrayLike) -> ArrayLike:
        return delta - self.sep if self.shifted else delta

    def kinetic(self, delta_dot: ArrayLike) -> ArrayLike:
        return 0.5 * self.j * np.square(delta_dot)

    def potential(self, delta: ArrayLike) -> ArrayLike:
        return self.e_0 - self.p_0 * delta - self.pem * np.cos(delta)


def energy_function(sw: EquivalentSwing, kind: Union[str, EnergyKind] = EnergyKind.CLASSIC,
                    shifted: bool = False, damping: Optional[float] = None) -> EnergyFunction:
    """
    Build the energy function of a swing system.

    The damping is frozen at its SEP value unless given explicitly.

    Raises:
        NoEquilibrium: If the system has no SEP
    """
    eq = swing_equilibria(sw).require()
    d = sw.frozen_damping(eq.sep) if damping is None else damping
    return EnergyFunction(
        kind=EnergyKind.parse(kind), j=sw.j_eq, d=d, p_0=sw.p0_eq, pem=sw.pem_eq,
        sep=eq.sep, shifted=shifted,
    )


def energy(f: EnergyFunction, state) -> ArrayLike:
    """Evaluate the energy function at a state (scalar or array)."""
    delta, delta_dot = _unpack(state)
    value = f.kinetic(delta_dot) + f.potential(delta)
    if f.kind is EnergyKind.MODIFIED:
        value = value + f.d * np.abs(f._angle(delta) * delta_dot)
    return value


def vdot_modified(f: EnergyFunction, state) -> ArrayLike:
    """-(D/J)*|delta*(P_0 - D*delta_dot - Pem*sin(delta))| as stated for the modified function."""
    delta, delta_dot = _unpack(state)
    residual = f.p_0 - f.d * delta_dot - f.pem * np.sin(delta)
    return -(f.d / f.j) * np.abs(f._angle(delta) * residual)


def vdot_classic(f: EnergyFunction, state) -> ArrayLike:
    """Time derivative of the classic function along the constant-damping swing: -D*delta_dot^2."""
    _, delta_dot = _unpack(state)
    return -f.d * np.square(delta_dot)


def numerical_vdot(f: EnergyFunction, t: np.ndarray, delta: np.ndarray,
                   delta_dot: np.ndarray) -> np.ndarray:
    """Finite-difference derivative of V along a sampled trajectory."""
    values = energy(f, (np.asarray(delta), np.asarray(delta_dot)))
    return np.gradient(values, np.asarray(t))


def flow_vdot(f: EnergyFunction, state) -> ArrayLike:
    """
    Derivative of V along the constant-damping swing vector field of f.

    Uses the one-sided (sign) derivative of the |delta*delta_dot| term, so for the
    modified kind it can be positive where the printed expression is not.
    """
    delta, delta_dot = _unpack(state)
    delta_ddot = (f.p_0 - f.d * delta_dot - f.pem * np.sin(delta)) / f.j
    dv_ddelta = -f.p_0 + f.pem * np.sin(delta)
    dv_drate = f.j * delta_dot
    if f.kind is EnergyKind.MODIFIED:
        a = f._angle(delta)
        s = np.sign(a * delta_dot)
        dv_ddelta = dv_ddelta + f.d * s * delta_dot
        dv_drate = dv_drate + f.d * s * a
    return dv_ddelta * delta_dot + dv_drate * delta_ddot
