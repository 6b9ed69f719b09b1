"""
Exception hierarchy for the syncarena toolkit.

Every error raised by the library derives from SyncArenaError so callers (and the
CLI) can catch domain failures in one place.
"""

from typing import Optional, Sequence


class SyncArenaError(Exception):
    """Base exception for all syncarena errors."""
    pass


class ParameterError(SyncArenaError, ValueError):
    """Exception raised when a parameter violates its type invariant."""
    pass


class SingularAlgebraicLoop(SyncArenaError):
    """The implicit PLL frequency loop 1 - k_p*l_g*i_d is (numerically) zero."""
    pass


class NonPositiveInertia(SyncArenaError):
    """The equivalent inertia of the GFL swing mapping is not positive."""
    pass


class ZeroIntegralGain(SyncArenaError):
    """k_i = 0: the PLL has no second-order swing form, use the first-order model."""
    pass


class ZeroDamping(SyncArenaError):
    """The first-order GFM reduction needs a strictly positive damping."""
    pass


class NonFiniteState(SyncArenaError):
    """Integration produced NaN or infinity."""

    def __init__(self, message: str, t: Optional[float] = None,
                 state: Optional[Sequence[float]] = None):
        if t is not None:
            message = f"{message} at t={t:.6f} s"
        super().__init__(message)
        self.t = t
        self.state = state


class NoEquilibrium(SyncArenaError):
    """The swing system has no stable equilibrium point."""
    pass


class DegenerateLevelSet(SyncArenaError):
    """No closed level curve around the SEP exists at the requested level."""
    pass


class NeverStable(SyncArenaError):
    """Critical clearing bracket failed: even immediate clearing is unstable."""
    pass


class AlwaysStable(SyncArenaError):
    """Critical clearing bracket failed: the system survives the whole search range."""
    pass


class ConfigError(SyncArenaError):
    """Exception raised for scenario config files that cannot be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class UsageError(SyncArenaError):
    """Command-line arguments that do not parse."""
    pass
