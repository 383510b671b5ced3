"""Iterated Minkowski sums of the Abel-Jacobi image on a discretized torus.

N(X) is the least m such that every class of J(R) is a sum of m points of
phi(X(R)).  On an n x n grid of R^2/Z^2 (omega-coordinates) with one layer
per real component, the m-fold sumset is computed by exact boolean
dilation.  Running it on a thickened raster (which contains every cell the
curve meets) reaches full coverage no later than the true curve, giving
``m_lower``; the thin raster (cells containing a curve sample) gives
``m_upper``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._parallel import pmap, thread_cap
from .bergman import TorusPolyline


class UnsupportedDimensionError(ValueError):
    pass


class SimulationBudgetError(RuntimeError):
    def __init__(self, message: str, m_max: int, coverage: float):
        super().__init__(message)
        self.m_max = m_max
        self.coverage = coverage


class ConvexityError(ValueError):
    def __init__(self, message: str, left_turns: int, right_turns: int):
        super().__init__(message)
        self.left_turns = left_turns
        self.right_turns = right_turns


Label = tuple[int, ...]


@dataclass
class TorusGrid:
    """Occupancy of an n x n torus grid, one boolean layer per component label.

    ``cells`` is the thin raster; ``thick`` is its one-cell dilation.
    """

    g: int
    n: int
    labels: list[Label]
    cells: dict[Label, np.ndarray]
    thick: dict[Label, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.g != 2:
            raise UnsupportedDimensionError(f"only g = 2 grids are supported, got g = {self.g}")
        if self.n < 64:
            raise ValueError(f"grid resolution must be at least 64, got {self.n}")
        if not any(layer.any() for layer in self.cells.values()):
            raise ValueError("grid has no occupied cells")
        if not self.thick:
            self.thick = {lab: _thicken(layer) for lab, layer in self.cells.items()}

    @classmethod
    def full(cls, n: int, label: Label = ()) -> "TorusGrid":
        layer = np.ones((n, n), dtype=bool)
        return cls(g=2, n=n, labels=[label], cells={label: layer}, thick={label: layer.copy()})

    def count(self, thick: bool = False) -> int:
        layers = self.thick if thick else self.cells
        return int(sum(int(layer.sum()) for layer in layers.values()))


def _thicken(layer: np.ndarray) -> np.ndarray:
    out = layer.copy()
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx or dy:
                out |= np.roll(layer, (dx, dy), axis=(0, 1))
    return out


def rasterize(polylines: list[TorusPolyline], n: int) -> TorusGrid:
    """Mark the cells met by each polyline under its component label.

    Each segment is sampled every 1/8 cell, so every cell the segment
    crosses lies within one cell of a marked one; the thickened layer is
    therefore a superset of the exact segment raster.
    """
    if not polylines:
        raise ValueError("cannot rasterize an empty list of polylines")
    g = polylines[0].g
    if g != 2:
        raise UnsupportedDimensionError(f"rasterization needs g = 2, got g = {g}")
    cells: dict[Label, np.ndarray] = {}
    for poly in polylines:
        pts = poly.lifted * n
        if poly.closed:
            pts = np.vstack([pts, pts[:1] + np.asarray(poly.advance) * n])
        steps = np.diff(pts, axis=0)
        k = max(1, int(math.ceil(8 * np.max(np.abs(steps)))))
        t = np.arange(k) / k
        dense = (pts[:-1, None, :] + t[None, :, None] * steps[:, None, :]).reshape(-1, 2)
        idx = np.floor(dense).astype(np.int64) % n
        layer = cells.setdefault(poly.component_label, np.zeros((n, n), dtype=bool))
        layer[idx[:, 0], idx[:, 1]] = True
    labels = sorted(cells)
    return TorusGrid(g=2, n=n, labels=labels, cells=cells)


def _add_labels(a: Label, b: Label) -> Label:
    return tuple((x + y) % 2 for x, y in zip(a, b))


def _dilate(S: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """OR of S shifted by every offset; exact, independent of chunking."""
    chunks = np.array_split(offsets, min(thread_cap(), max(1, len(offsets) // 64)))

    def part(offs):
        out = np.zeros_like(S)
        for dx, dy in offs:
            out |= np.roll(S, (int(dx), int(dy)), axis=(0, 1))
        return out

    result = np.zeros_like(S)
    for piece in pmap(part, [c for c in chunks if len(c)]):
        result |= piece
    return result


def sumset_step(current: dict[Label, np.ndarray],
                base: dict[Label, np.ndarray]) -> dict[Label, np.ndarray]:
    """One more summand: {x + y : x in current, y in base} with labels added mod 2."""
    out: dict[Label, np.ndarray] = {}
    for lb, layer_b in base.items():
        offsets = np.argwhere(layer_b)
        if not len(offsets):
            continue
        for la, layer_a in current.items():
            if not layer_a.any():
                continue
            lab = _add_labels(la, lb)
            d = _dilate(layer_a, offsets)
            out[lab] = out[lab] | d if lab in out else d
    return out


def _all_labels(g: int, r: int) -> list[Label]:
    k = r - 1
    return [tuple((i >> j) & 1 for j in range(k)) for i in range(2 ** k)]


def _coverage(layers: dict[Label, np.ndarray], targets: list[Label], n: int) -> float:
    total = sum(int(layers[t].sum()) if t in layers else 0 for t in targets)
    return total / (len(targets) * n * n)


def sumset_sequence(base: dict[Label, np.ndarray], m_max: int):
    """Yield (m, m-fold sumset) for m = 1, 2, ... up to m_max."""
    current = {k: v.copy() for k, v in base.items()}
    yield 1, current
    for m in range(2, m_max + 1):
        current = sumset_step(current, base)
        yield m, current


def _first_full(base: dict[Label, np.ndarray], targets: list[Label], n: int, m_max: int) -> int:
    coverage = 0.0
    for m, layers in sumset_sequence(base, m_max):
        coverage = _coverage(layers, targets, n)
        if coverage == 1.0:
            return m
    raise SimulationBudgetError(
        f"no full coverage within m_max = {m_max} (coverage {coverage:.4f})", m_max, coverage)


def min_cover_m(grid: TorusGrid, r: int, m_max: int | None = None) -> tuple[int, int]:
    """Bracket (m_lower, m_upper) for the least m covering every component.

    ``r`` is the number of real ovals; labels run over (Z/2)^(r-1).
    """
    m_max = m_max or 4 * grid.n
    if r == 1:
        targets = [grid.labels[0]]
    else:
        targets = _all_labels(grid.g, r)
    m_lower = _first_full(grid.thick, targets, grid.n, m_max)
    m_upper = _first_full(grid.cells, targets, grid.n, m_max)
    return m_lower, m_upper


def min_m_reaching(grid: TorusGrid, cell: tuple[int, int], label: Label | None = None,
                   thick: bool = True, m_max: int | None = None) -> int:
    """Least m for which the m-fold sumset contains ``cell`` in layer ``label``."""
    m_max = m_max or 4 * grid.n
    base = grid.thick if thick else grid.cells
    label = label if label is not None else grid.labels[0]
    for m, layers in sumset_sequence(base, m_max):
        if label in layers and layers[label][cell]:
            return m
    raise SimulationBudgetError(f"cell {cell} not reached within m_max = {m_max}", m_max, 0.0)


def convexity_scan(points: np.ndarray) -> tuple[bool, int, int]:
    """Whether a closed planar polyline turns consistently once around."""
    pts = np.asarray(points, dtype=float)
    d = np.diff(np.vstack([pts, pts[:1]]), axis=0)
    d = d[np.any(d != 0, axis=1)]
    nxt = np.roll(d, -1, axis=0)
    cross = d[:, 0] * nxt[:, 1] - d[:, 1] * nxt[:, 0]
    tol = 1e-9 * float(np.max(np.abs(cross))) if len(cross) else 0.0
    left, right = int(np.sum(cross > tol)), int(np.sum(cross < -tol))
    turning = float(np.sum(np.arctan2(cross, np.einsum("ij,ij->i", d, nxt))))
    ok = abs(abs(turning) - 2 * math.pi) < 1e-6 and (left == 0 or right == 0)
    return ok, left, right


def _inside_convex(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    d = np.roll(points, -1, axis=0) - points
    rel = queries[:, None, :] - points[None, :, :]
    cross = d[None, :, 0] * rel[:, :, 1] - d[None, :, 1] * rel[:, :, 0]
    return np.all(cross >= 0, axis=1) | np.all(cross <= 0, axis=1)


def midpoint_convexity_check(points, samples: int = 100, seed: int = 0) -> float:
    """Max over random interior alpha of min |alpha - (gamma1 + gamma2)/2|.

    ``points`` is a closed planar polyline (N x 2), e.g. a lifted
    Abel-Jacobi image in orthonormal coordinates.  Distances to the curve
    are measured to its vertices, so the result also reflects sampling.
    """
    pts = np.asarray(points, dtype=float)
    ok, left, right = convexity_scan(pts)
    if not ok:
        raise ConvexityError(
            f"polyline is not convex ({left} left turns, {right} right turns)", left, right)
    rng = np.random.default_rng(seed)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    alphas = np.empty((0, 2))
    while len(alphas) < samples:
        cand = lo + (hi - lo) * rng.random((4 * samples, 2))
        alphas = np.vstack([alphas, cand[_inside_convex(pts, cand)]])
    alphas = alphas[:samples]
    tree = cKDTree(pts)
    worst = 0.0
    for a in alphas:
        dist, _ = tree.query(2 * a - pts)
        worst = max(worst, 0.5 * float(dist.min()))
    return worst


def grid_to_pgm(layer: np.ndarray) -> bytes:
    """Binary PGM (P5) image of one occupancy layer; occupied cells are black."""
    n0, n1 = layer.shape
    # rows of the image run along the second coordinate, top = high values
    img = np.where(layer.T[::-1], 0, 255).astype(np.uint8)
    return f"P5\n{n0} {n1}\n255\n".encode() + img.tobytes()


def bracket_to_dict(m_lower: int, m_upper: int, n: int, grid: TorusGrid) -> dict:
    return {"m_lower": int(m_lower), "m_upper": int(m_upper), "grid_n": int(n),
            "midpoint": 0.5 * (m_lower + m_upper), "width": int(m_upper - m_lower),
            "labels": [list(lab) for lab in grid.labels],
            "thin_cells": grid.count(), "thick_cells": grid.count(thick=True)}
