"""Geometric coverage primitives.

Sensing disks, square grid regions, the global region/sensor bipartite
graph and the pessimistic per-node local graph used by the distributed
scheduler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError

SQRT2 = math.sqrt(2.0)

# reproduces the 24-square disk layout at resolution 6
DEFAULT_TEMPLATE_TAU = 0.86
DEFAULT_TEMPLATE_RESOLUTION = 6


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates: ({self.x}, {self.y})")

    def distance(self, other: "Point2D") -> float:
        return float(np.hypot(self.x - other.x, self.y - other.y))

    def __add__(self, offset) -> "Point2D":
        dx, dy = offset
        return Point2D(self.x + dx, self.y + dy)

    def __iter__(self):
        yield self.x
        yield self.y


class NodeState(Enum):
    AWAKE = "awake"
    ASLEEP = "asleep"
    DEAD = "dead"


class Decision(Enum):
    UNDECIDED = "undecided"
    SLEEP = "sleep"
    AWAKE = "awake"


@dataclass(frozen=True)
class SensorNode:
    id: int
    position: Point2D
    sensing_radius: float
    comm_radius: float
    energy: float
    state: NodeState = NodeState.AWAKE

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"node id must be non-negative, got {self.id}")
        if self.sensing_radius <= 0 or self.comm_radius <= 0:
            raise ValueError("radii must be positive")
        if self.energy < 0:
            raise ValueError(f"negative energy for node {self.id}")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned target area."""

    x0: float
    y0: float
    width: float
    height: float

    def contains(self, p) -> bool:
        x, y = p
        return self.x0 <= x <= self.x0 + self.width and self.y0 <= y <= self.y0 + self.height


@dataclass(frozen=True)
class RegionGrid:
    origin: Point2D
    cell_side: float
    n_cols: int
    n_rows: int

    def __post_init__(self):
        if self.cell_side <= 0:
            raise ConfigurationError("cell_side must be positive")
        if self.n_cols < 1 or self.n_rows < 1:
            raise ConfigurationError("grid needs at least one row and column")

    @classmethod
    def covering(cls, area: Rect, cell_side: float) -> "RegionGrid":
        n_cols = max(1, math.ceil(area.width / cell_side - 1e-9))
        n_rows = max(1, math.ceil(area.height / cell_side - 1e-9))
        return cls(Point2D(area.x0, area.y0), cell_side, n_cols, n_rows)

    @property
    def half_side(self) -> float:
        return self.cell_side / 2.0

    def __len__(self) -> int:
        return self.n_cols * self.n_rows

    def center(self, i: int, j: int) -> Point2D:
        return Point2D(self.origin.x + (i + 0.5) * self.cell_side,
                       self.origin.y + (j + 0.5) * self.cell_side)

    @property
    def centers(self) -> np.ndarray:
        """Cell centers as an (n, 2) array, row-major (region id = j * n_cols + i)."""
        i = np.arange(self.n_cols)
        j = np.arange(self.n_rows)
        xs = self.origin.x + (i + 0.5) * self.cell_side
        ys = self.origin.y + (j + 0.5) * self.cell_side
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True, eq=False)
class CoverageGraph:
    """Bipartite region/sensor graph stored as a boolean incidence matrix.

    ``incidence[r, j]`` is true when sensor ``sensor_ids[j]`` covers region
    ``region_ids[r]``.
    """

    region_ids: tuple
    sensor_ids: tuple
    incidence: np.ndarray
    _column: dict = field(init=False, repr=False)

    def __post_init__(self):
        inc = np.asarray(self.incidence, dtype=bool).reshape(len(self.region_ids), len(self.sensor_ids))
        inc.setflags(write=False)
        object.__setattr__(self, "incidence", inc)
        object.__setattr__(self, "_column", {s: j for j, s in enumerate(self.sensor_ids)})
        if len(self._column) != len(self.sensor_ids):
            raise ValueError("duplicate sensor ids")

    def column(self, sensor_id: int) -> int:
        return self._column[sensor_id]

    def degrees(self, sensors: Iterable[int] | None = None) -> np.ndarray:
        """Region degrees c_r, optionally counting only the given sensors."""
        if sensors is None:
            return self.incidence.sum(axis=1)
        return self.incidence[:, self.mask(sensors)].sum(axis=1)

    def mask(self, sensors: Iterable[int]) -> np.ndarray:
        m = np.zeros(len(self.sensor_ids), dtype=bool)
        for s in sensors:
            j = self._column.get(s)
            if j is not None:
                m[j] = True
        return m

    def sensors_of(self, region_index: int) -> frozenset:
        cols = np.flatnonzero(self.incidence[region_index])
        return frozenset(self.sensor_ids[j] for j in cols)

    def regions_of(self, sensor_id: int) -> frozenset:
        rows = np.flatnonzero(self.incidence[:, self._column[sensor_id]])
        return frozenset(self.region_ids[r] for r in rows)

    def edges(self):
        for r, j in zip(*np.nonzero(self.incidence)):
            yield self.region_ids[r], self.sensor_ids[j]

    def restricted_to(self, sensors: Iterable[int]) -> "CoverageGraph":
        m = self.mask(sensors)
        kept = tuple(s for s, keep in zip(self.sensor_ids, m) if keep)
        return CoverageGraph(self.region_ids, kept, self.incidence[:, m])


class CoverageMode(Enum):
    EXACT_CENTER = "exact_center"
    PESSIMISTIC = "pessimistic"


def disk_covers_point(center, radius: float, p) -> bool:
    """Closed-disk membership test."""
    cx, cy = center
    px, py = p
    return bool(np.hypot(px - cx, py - cy) <= radius)


def cell_covered_pessimistic(s_pos, cell_offset, w_pos, R: float, delta: float) -> bool:
    """True if node ``w`` safely covers the square cell of half-side ``delta``
    centred at ``s_pos + cell_offset`` (strict inequality on purpose)."""
    sx, sy = s_pos
    dx, dy = cell_offset
    wx, wy = w_pos
    return bool(R - SQRT2 * delta > np.hypot(sx + dx - wx, sy + dy - wy))


def _positions(nodes: Sequence[SensorNode]) -> np.ndarray:
    return np.array([[n.position.x, n.position.y] for n in nodes], dtype=float).reshape(-1, 2)


def distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def build_coverage_graph(nodes: Sequence[SensorNode], grid: RegionGrid,
                         mode: CoverageMode = CoverageMode.EXACT_CENTER) -> CoverageGraph:
    centers = grid.centers
    radii = np.array([n.sensing_radius for n in nodes], dtype=float)
    dist = distance_matrix(centers, _positions(nodes))
    if mode is CoverageMode.EXACT_CENTER:
        inc = dist <= radii[None, :]
    else:
        inc = (radii[None, :] - SQRT2 * grid.half_side) > dist
    return CoverageGraph(tuple(range(len(grid))), tuple(n.id for n in nodes), inc)


@dataclass(frozen=True, eq=False)
class RegionTemplate:
    """Square cells approximating one node's sensing disk, as offsets from the node."""

    offsets: np.ndarray
    half_side: float

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float).reshape(-1, 2)
        off.setflags(write=False)
        object.__setattr__(self, "offsets", off)

    def __len__(self) -> int:
        return len(self.offsets)

    def __iter__(self):
        for dx, dy in self.offsets:
            yield (float(dx), float(dy))


def _check_template_args(R: float, resolution: int, tau: float):
    if resolution < 2:
        raise ConfigurationError(f"template resolution must be >= 2, got {resolution}")
    if R <= 0:
        raise ConfigurationError("sensing radius must be positive")
    if tau <= 0:
        raise ConfigurationError("template tau must be positive")


def local_region_template(R: float, resolution: int = DEFAULT_TEMPLATE_RESOLUTION,
                          tau: float = DEFAULT_TEMPLATE_TAU) -> RegionTemplate:
    """Node-centred template: cells of a resolution x resolution lattice over the
    disk's bounding box whose centres are within ``tau * R`` of the node."""
    _check_template_args(R, resolution, tau)
    side = 2.0 * R / resolution
    c = -R + (np.arange(resolution) + 0.5) * side
    gx, gy = np.meshgrid(c, c)
    off = np.column_stack([gx.ravel(), gy.ravel()])
    keep = np.hypot(off[:, 0], off[:, 1]) <= tau * R
    return RegionTemplate(off[keep], side / 2.0)


def aligned_region_template(position, R: float, resolution: int = DEFAULT_TEMPLATE_RESOLUTION,
                            tau: float = DEFAULT_TEMPLATE_TAU, anchor=(0.0, 0.0),
                            area: Rect | None = None) -> RegionTemplate:
    """Template drawn from a lattice shared by all nodes (anchored at ``anchor``).

    Cells are the shared-lattice squares of side ``2R/resolution`` whose centres
    lie within ``tau * R`` of ``position``; with ``area`` given, cells whose
    centre falls outside the target area are dropped.  When every node sits on
    the lattice (e.g. grid deployments with a spacing that is a multiple of the
    cell side) this is identical to :func:`local_region_template`.
    """
    _check_template_args(R, resolution, tau)
    side = 2.0 * R / resolution
    px, py = position
    ax, ay = anchor
    reach = tau * R
    i0 = math.floor((px - reach - ax) / side) - 1
    i1 = math.ceil((px + reach - ax) / side) + 1
    j0 = math.floor((py - reach - ay) / side) - 1
    j1 = math.ceil((py + reach - ay) / side) + 1
    xs = ax + (np.arange(i0, i1 + 1) + 0.5) * side
    ys = ay + (np.arange(j0, j1 + 1) + 0.5) * side
    gx, gy = np.meshgrid(xs, ys)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    keep = np.hypot(centers[:, 0] - px, centers[:, 1] - py) <= reach
    if area is not None:
        keep &= ((centers[:, 0] >= area.x0) & (centers[:, 0] <= area.x0 + area.width)
                 & (centers[:, 1] >= area.y0) & (centers[:, 1] <= area.y0 + area.height))
    return RegionTemplate(centers[keep] - np.array([px, py]), side / 2.0)


def local_subgraph(s: SensorNode, neighbors: Sequence[SensorNode],
                   template: RegionTemplate) -> CoverageGraph:
    """G_s: ``s``'s template cells versus ``s`` and its known neighbours.

    ``s`` covers each of its own cells by definition; a neighbour covers a cell
    only if it contains the whole square (pessimistic test).
    """
    if any(w.id == s.id for w in neighbors):
        raise ValueError("neighbors must not include the node itself")
    n_cells = len(template)
    inc = np.zeros((n_cells, 1 + len(neighbors)), dtype=bool)
    inc[:, 0] = True
    if neighbors and n_cells:
        centers = template.offsets + np.array([s.position.x, s.position.y])
        dist = distance_matrix(centers, _positions(neighbors))
        radii = np.array([w.sensing_radius for w in neighbors], dtype=float)
        inc[:, 1:] = (radii[None, :] - SQRT2 * template.half_side) > dist
    return CoverageGraph(tuple(range(n_cells)), (s.id,) + tuple(w.id for w in neighbors), inc)
