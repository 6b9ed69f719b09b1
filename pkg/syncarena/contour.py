"""
Level-set extraction on a rectangular grid (marching squares) and polygon areas.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

logger = logging.getLogger("syncarena.stability")

EdgeKey = Tuple[str, int, int]

# Segments per cell case. Corner bits: 1 bottom-left, 2 bottom-right, 4 top-right,
# 8 top-left (bit set when the corner lies above the level). Edges: B, R, T, L.
_SEGMENTS = {
    1: (("L", "B"),),
    2: (("B", "R"),),
    3: (("L", "R"),),
    4: (("R", "T"),),
    6: (("B", "T"),),
    7: (("L", "T"),),
    8: (("T", "L"),),
    9: (("B", "T"),),
    11: (("R", "T"),),
    12: (("L", "R"),),
    13: (("B", "R"),),
    14: (("L", "B"),),
}

# Saddle cells, keyed by (case, center above level)
_SADDLES = {
    (5, True): (("B", "R"), ("T", "L")),
    (5, False): (("L", "B"), ("R", "T")),
    (10, True): (("L", "B"), ("R", "T")),
    (10, False): (("B", "R"), ("T", "L")),
}


@dataclass(frozen=True)
class Contour:
    """One connected piece of a level set."""

    points: np.ndarray
    closed: bool

    @property
    def area(self) -> float:
        return polygon_area(self.points) if self.closed else 0.0

    def encloses(self, x: float, y: float) -> bool:
        return bool(points_in_polygon(self.points, np.array([x]), np.array([y]))[0])


def polygon_area(points: np.ndarray) -> float:
    """Shoelace area of a simple polygon given as an (n, 2) vertex array."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def points_in_polygon(points: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Even-odd ray casting test of many query points against one polygon."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = np.zeros(x.shape, dtype=bool)
    px, py = points[:, 0], points[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    for x0, y0, x1, y1 in zip(px, py, qx, qy):
        if y0 == y1:
            continue
        crosses = (y0 > y) != (y1 > y)
        x_at = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (x < x_at)
    return inside


def _edge_keys(j: int, i: int) -> Dict[str, EdgeKey]:
    return {
        "B": ("h", j, i),
        "T": ("h", j + 1, i),
        "L": ("v", j, i),
        "R": ("v", j, i + 1),
    }


def _edge_nodes(key: EdgeKey) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    kind, j, i = key
    if kind == "h":
        return (j, i), (j, i + 1)
    return (j, i), (j + 1, i)


def extract_contours(x: np.ndarray, y: np.ndarray, z: np.ndarray, level: float,
                     func: Optional[Callable[[float, float], float]] = None) -> List[Contour]:
    """
    Marching squares on z[j, i] sampled at (x[i], y[j]).

    The grid is framed by a border that lies above the level, so every piece of
    the sublevel set {z <= level} is bounded by a closed contour. Crossing points
    are placed by linear interpolation, then refined with brentq on func when it
    is given and brackets the level along the edge.

    Returns:
        Contours, closed ones first, in extraction order
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (len(y), len(x)):
        raise ValueError(f"z has shape {z.shape}, expected {(len(y), len(x))}")
    if len(x) < 2 or len(y) < 2:
        raise ValueError("the grid needs at least 2x2 nodes")

    dx0, dx1 = x[1] - x[0], x[-1] - x[-2]
    dy0, dy1 = y[1] - y[0], y[-1] - y[-2]
    xs = np.concatenate(([x[0] - dx0], x, [x[-1] + dx1]))
    ys = np.concatenate(([y[0] - dy0], y, [y[-1] + dy1]))
    finite = z[np.isfinite(z)]
    above_value = max(float(finite.max()) if finite.size else level, level) + 1.0
    zs = np.full((len(ys), len(xs)), above_value)
    zs[1:-1, 1:-1] = np.where(np.isfinite(z), z, above_value)
    padded = np.zeros(zs.shape, dtype=bool)
    padded[[0, -1], :] = True
    padded[:, [0, -1]] = True

    above = zs > level
    case = (above[:-1, :-1].astype(int)
            | (above[:-1, 1:].astype(int) << 1)
            | (above[1:, 1:].astype(int) << 2)
            | (above[1:, :-1].astype(int) << 3))

    point_cache: Dict[EdgeKey, np.ndarray] = {}

    def crossing(key: EdgeKey) -> np.ndarray:
        if key in point_cache:
            return point_cache[key]
        (ja, ia), (jb, ib) = _edge_nodes(key)
        za, zb = zs[ja, ia], zs[jb, ib]
        pa = np.array([xs[ia], ys[ja]])
        pb = np.array([xs[ib], ys[jb]])
        if padded[ja, ia] or padded[jb, ib]:
            # the border is artificial: the crossing sits on the real node
            point = pb if padded[ja, ia] else pa
        else:
            s = (level - za) / (zb - za)
            point = pa + s * (pb - pa)
            if func is not None:
                point = _refine(func, pa, pb, level, point)
        point_cache[key] = point
        return point

    segments: List[Tuple[EdgeKey, EdgeKey]] = []
    js, is_ = np.nonzero((case != 0) & (case != 15))
    for j, i in zip(js.tolist(), is_.tolist()):
        c = int(case[j, i])
        keys = _edge_keys(j, i)
        if c in (5, 10):
            center = 0.25 * (zs[j, i] + zs[j, i + 1] + zs[j + 1, i + 1] + zs[j + 1, i])
            pairs = _SADDLES[(c, bool(center > level))]
        else:
            pairs = _SEGMENTS[c]
        for a, b in pairs:
            segments.append((keys[a], keys[b]))

    contours = [Contour(np.array([crossing(k) for k in chain]), closed)
                for chain, closed in _join(segments)]
    logger.debug(f"Extracted {len(contours)} contour pieces from {len(segments)} segments")
    contours.sort(key=lambda c: not c.closed)
    return contours


def _refine(func, pa: np.ndarray, pb: np.ndarray, level: float, guess: np.ndarray) -> np.ndarray:
    def g(s):
        p = pa + s * (pb - pa)
        return func(p[0], p[1]) - level

    ga, gb = g(0.0), g(1.0)
    if not (np.isfinite(ga) and np.isfinite(gb)) or ga * gb > 0.0:
        return guess
    if ga == 0.0:
        return pa.copy()
    if gb == 0.0:
        return pb.copy()
    s = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=1e-15, maxiter=200)
    return pa + s * (pb - pa)


def _join(segments: List[Tuple[EdgeKey, EdgeKey]]) -> List[Tuple[List[EdgeKey], bool]]:
    """Chain segments sharing edge crossings into polylines."""
    neighbors: Dict[EdgeKey, List[EdgeKey]] = {}
    for a, b in segments:
        neighbors.setdefault(a, []).append(b)
        neighbors.setdefault(b, []).append(a)

    visited = set()
    chains: List[Tuple[List[EdgeKey], bool]] = []

    def walk(start: EdgeKey) -> Tuple[List[EdgeKey], bool]:
        chain = [start]
        visited.add(start)
        prev, node = None, start
        while True:
            nxt = [n for n in neighbors[node] if n != prev and (n not in visited or n == start)]
            if not nxt:
                return chain, False
            candidate = nxt[0]
            if candidate == start:
                return chain, len(chain) > 2
            visited.add(candidate)
            chain.append(candidate)
            prev, node = node, candidate

    # open chains start from their loose ends
    for key, adj in neighbors.items():
        if len(adj) == 1 and key not in visited:
            chains.append(walk(key))
    for key in neighbors:
        if key not in visited:
            chains.append(walk(key))
    return chains


def enclosing_contour(contours: List[Contour], x: float, y: float) -> Optional[Contour]:
    """Smallest closed contour containing the point, or None."""
    best = None
    for contour in contours:
        if contour.closed and contour.encloses(x, y):
            if best is None or contour.area < best.area:
                best = contour
    return best
