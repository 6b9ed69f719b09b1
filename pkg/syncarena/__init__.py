"""
syncarena: transient synchronization stability of grid-connected converters.

Simulates PLL-synchronized (grid-following) and VSG-based (grid-forming)
converters on an infinite bus through their common second-order swing form,
and judges synchronism with equal-area criteria, energy-function regions of
attraction and simulated basins of attraction.

Set SYNCARENA_DEBUG=true for debug logging of the long-running analyses.
"""

import logging

from .control import Variant
from .errors import (
    AlwaysStable,
    ConfigError,
    DegenerateLevelSet,
    NeverStable,
    NoEquilibrium,
    NonFiniteState,
    NonPositiveInertia,
    ParameterError,
    SingularAlgebraicLoop,
    SyncArenaError,
    ZeroDamping,
    ZeroIntegralGain,
)
from .integrate import StepConfig, TimedEvent, Trajectory, Verdict, VerdictKind, simulate
from .models import EquivalentSwing, SwingState, gfl_to_swing, gfm_to_swing
from .params import CurrentSetpoint, GflParams, GfmParams, GridParams, PerUnitBase
from .plant import Plant, PlantParams
from .scenario import get_preset, preset_table2, run_fig7, run_fig8, run_scenario
from .settings import debug_enabled, load_env

logger = logging.getLogger("syncarena.init")

load_env()

# Ensure debug logging is enabled when SYNCARENA_DEBUG is set
if debug_enabled():
    _root = logging.getLogger("syncarena")
    _root.setLevel(logging.DEBUG)
    if not _root.handlers:
        handler = logging.StreamHandler()
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter('DEBUG - %(name)s - %(message)s'))
        _root.addHandler(handler)
    logger.debug("Debug logging enabled")

__version__ = "0.1.0"

__all__ = [
    # Parameters and models
    "PerUnitBase",
    "GridParams",
    "CurrentSetpoint",
    "GflParams",
    "GfmParams",
    "PlantParams",
    "Plant",
    "Variant",
    "SwingState",
    "EquivalentSwing",
    "gfl_to_swing",
    "gfm_to_swing",

    # Simulation
    "StepConfig",
    "TimedEvent",
    "Trajectory",
    "Verdict",
    "VerdictKind",
    "simulate",

    # Scenarios
    "get_preset",
    "preset_table2",
    "run_fig7",
    "run_fig8",
    "run_scenario",

    # Errors
    "SyncArenaError",
    "ParameterError",
    "SingularAlgebraicLoop",
    "NonPositiveInertia",
    "ZeroIntegralGain",
    "ZeroDamping",
    "NonFiniteState",
    "NoEquilibrium",
    "DegenerateLevelSet",
    "NeverStable",
    "AlwaysStable",
    "ConfigError",
]
