"""
Run instrumentation for the long-running analysis calls.

The decorator logs the call, its wall time and a short result summary at DEBUG
level on the logger of the wrapped function's area.
"""

import datetime
import logging
from typing import Any, Callable, Optional

import wrapt

logger = logging.getLogger("syncarena.instrument")


def _summarize(result: Any) -> str:
    summary = getattr(result, "summary", None)
    if callable(summary):
        try:
            return str(summary())
        except Exception as e:  # a failing summary must never break the run
            return f"<summary failed: {e}>"
    if isinstance(result, (list, tuple)):
        return f"{type(result).__name__} of {len(result)}"
    return type(result).__name__


def instrumented(area: str, label: Optional[str] = None) -> Callable:
    """
    Decorate an analysis function with DEBUG timing logs.

    Args:
        area: Logger suffix, e.g. "integrate" logs on syncarena.integrate
        label: Name used in the log lines (defaults to the function name)
    """
    area_logger = logging.getLogger(f"syncarena.{area}")

    @wrapt.decorator
    def wrapper(wrapped, instance, args, kwargs):
        name = label or wrapped.__name__
        if not area_logger.isEnabledFor(logging.DEBUG):
            return wrapped(*args, **kwargs)

        started = datetime.datetime.now(datetime.timezone.utc)
        area_logger.debug(f"{name} started")
        try:
            result = wrapped(*args, **kwargs)
        except Exception as e:
            elapsed = (datetime.datetime.now(datetime.timezone.utc) - started).total_seconds()
            area_logger.debug(f"{name} failed after {elapsed * 1000:.1f} ms: {e}")
            raise
        elapsed = (datetime.datetime.now(datetime.timezone.utc) - started).total_seconds()
        area_logger.debug(f"{name} finished in {elapsed * 1000:.1f} ms: {_summarize(result)}")
        return result

    return wrapper
