"""
CSV and summary writers for the command-line artifacts.

Floats are written with repr (shortest round-trip decimal), so identical runs
produce identical bytes.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Sequence, Union

from .integrate import TRAJECTORY_COLUMNS, Trajectory
from .stability import BasinMap, RoaEstimate

logger = logging.getLogger("syncarena.export")

PathLike = Union[str, Path]


def format_number(value: Any) -> str:
    """repr of floats, true/false for booleans, empty for None, str of everything else."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(float(value))
    if hasattr(value, "dtype") and hasattr(value, "item"):
        return format_number(value.item())
    return str(value)


def ensure_dir(path: PathLike) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]],
                preamble: Sequence[str] = ()) -> Path:
    path = Path(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in preamble:
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def write_trajectory_csv(traj: Trajectory, path: PathLike) -> Path:
    """One row per recorded sample: t,delta,delta_dot,v_pccq,j_eff,kp_eff,energy."""
    return _write_rows(path, TRAJECTORY_COLUMNS, traj.rows())


def write_roa_csv(roa: RoaEstimate, path: PathLike) -> Path:
    """Boundary polyline preceded by a '# c=... kind=... area=...' line."""
    meta = f"# c={format_number(roa.c)} kind={roa.kind.value} area={format_number(roa.area)}"
    return _write_rows(path, ("delta", "delta_dot"), roa.boundary.tolist(), preamble=(meta,))


def write_basin_csv(basin: BasinMap, path: PathLike) -> Path:
    return _write_rows(path, ("delta0", "delta_dot0", "verdict"), basin.rows())


def write_sweep_csv(rows: List[Mapping[str, Any]], path: PathLike,
                    columns: Sequence[str] = ()) -> Path:
    """
    Sweep table; columns default to the keys of the first row in their order.
    """
    if not columns:
        columns = list(rows[0].keys()) if rows else []
    return _write_rows(path, columns, ([row.get(c, "") for c in columns] for row in rows))


def write_summary(values: Mapping[str, Any], path: PathLike) -> Path:
    """Machine-readable key=value lines in insertion order."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in values.items():
            f.write(f"{key}={format_number(value)}\n")
    return path


def read_summary(path: PathLike) -> dict:
    """Parse a summary file back into a str -> str mapping."""
    out = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line and "=" in line:
                key, value = line.split("=", 1)
                out[key] = value
    return out
