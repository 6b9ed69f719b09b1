"""
Environment settings.

Captures the SYNCARENA_* environment variables, with a .env file in the
working directory loaded on first use. Invalid values are reported with a
warning and replaced by the default; they never raise.
"""

import logging
import math
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Environment variable names
ENV_SYNCARENA_OUT = "SYNCARENA_OUT"
ENV_SYNCARENA_JOBS = "SYNCARENA_JOBS"
ENV_SYNCARENA_DT = "SYNCARENA_DT"
ENV_SYNCARENA_DEBUG = "SYNCARENA_DEBUG"

DEFAULT_OUT = "syncarena-out"
DEFAULT_JOBS = 1
DEFAULT_DT = 1e-4

_TRUE_VALUES = ("true", "1", "yes")

_dotenv_loaded = False


def load_env(dotenv_path: Optional[str] = None, force: bool = False) -> bool:
    """
    Load a .env file into os.environ without overriding variables already set.

    Returns:
        True if a file was found and loaded
    """
    global _dotenv_loaded
    if _dotenv_loaded and not force:
        return False
    _dotenv_loaded = True
    path = dotenv_path or os.path.join(os.getcwd(), ".env")
    if not os.path.isfile(path):
        return False
    logger.debug(f"Loading environment from {path}")
    return load_dotenv(path, override=False)


def debug_enabled() -> bool:
    """True when SYNCARENA_DEBUG is one of true/1/yes (case-insensitive)."""
    return os.getenv(ENV_SYNCARENA_DEBUG, "").lower() in _TRUE_VALUES


def get_out_dir() -> Path:
    """
    Default output directory.

    Returns:
        SYNCARENA_OUT, or ./syncarena-out when unset or empty
    """
    load_env()
    value = os.getenv(ENV_SYNCARENA_OUT, "").strip()
    return Path(value) if value else Path(DEFAULT_OUT)


def get_jobs() -> int:
    """
    Default worker count for basin maps and sweeps.

    Returns:
        SYNCARENA_JOBS as a positive integer, 1 when unset or invalid
    """
    load_env()
    raw = os.getenv(ENV_SYNCARENA_JOBS)
    if raw is None or not raw.strip():
        return DEFAULT_JOBS
    try:
        jobs = int(raw)
    except ValueError:
        logger.warning(f"Invalid {ENV_SYNCARENA_JOBS} value '{raw}', defaulting to {DEFAULT_JOBS}")
        return DEFAULT_JOBS
    if jobs < 1:
        logger.warning(f"{ENV_SYNCARENA_JOBS} must be at least 1, got {jobs}; defaulting to {DEFAULT_JOBS}")
        return DEFAULT_JOBS
    return jobs


def get_dt() -> float:
    """
    Default integration step.

    Returns:
        SYNCARENA_DT as a positive finite float, 1e-4 when unset or invalid
    """
    load_env()
    raw = os.getenv(ENV_SYNCARENA_DT)
    if raw is None or not raw.strip():
        return DEFAULT_DT
    try:
        dt = float(raw)
    except ValueError:
        logger.warning(f"Invalid {ENV_SYNCARENA_DT} value '{raw}', defaulting to {DEFAULT_DT}")
        return DEFAULT_DT
    if not math.isfinite(dt) or dt <= 0.0:
        logger.warning(f"{ENV_SYNCARENA_DT} must be positive, got {raw}; defaulting to {DEFAULT_DT}")
        return DEFAULT_DT
    return dt
