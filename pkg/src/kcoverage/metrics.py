"""Quality-of-service metrics and brute-force cover checks."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .coverage import (CoverageGraph, Rect, RegionTemplate, SensorNode, distance_matrix,
                       local_subgraph)
from .errors import InvalidCoverError


@dataclass(frozen=True)
class MetricsRow:
    period: int
    alive: int
    awake: int
    theta: tuple
    theta_prime: tuple
    messages: int = 0

    def __post_init__(self):
        if self.awake > self.alive:
            raise ValueError(f"period {self.period}: awake {self.awake} > alive {self.alive}")


@dataclass
class MetricsTrace:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    @property
    def levels(self) -> int:
        return len(self.rows[0].theta) if self.rows else 0

    def column(self, name: str) -> list:
        """Values of one CSV-style column: alive, awake, messages, theta<k>, theta_p<k>."""
        if name in ("period", "alive", "awake", "messages"):
            return [getattr(r, name) for r in self.rows]
        if name.startswith("theta_p"):
            return [r.theta_prime[int(name[7:]) - 1] for r in self.rows]
        if name.startswith("theta"):
            return [r.theta[int(name[5:]) - 1] for r in self.rows]
        raise KeyError(name)

    def network_lifetime(self) -> int:
        """Last period in which any node was alive (0 if none)."""
        return max((r.period for r in self.rows if r.alive > 0), default=0)


def sample_lattice(area: Rect, spacing: float) -> np.ndarray:
    """Cell-centred sample points covering ``area`` at the given spacing."""
    if spacing <= 0:
        raise ValueError("sample spacing must be positive")
    nx = max(1, math.ceil(area.width / spacing - 1e-9))
    ny = max(1, math.ceil(area.height / spacing - 1e-9))
    xs = area.x0 + (np.arange(nx) + 0.5) * spacing
    ys = area.y0 + (np.arange(ny) + 0.5) * spacing
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def cover_counts(points: np.ndarray, nodes: Sequence[SensorNode]) -> np.ndarray:
    if not nodes:
        return np.zeros(len(points), dtype=int)
    pos = np.array([[n.position.x, n.position.y] for n in nodes])
    radii = np.array([n.sensing_radius for n in nodes])
    return (distance_matrix(points, pos) <= radii[None, :]).sum(axis=1)


def theta_k(awake: Sequence[SensorNode], area: Rect, sample_spacing: float, k: int) -> float:
    """Area fraction covered by at least ``k`` awake disks, estimated on a lattice."""
    counts = cover_counts(sample_lattice(area, sample_spacing), list(awake))
    return float(np.mean(counts >= k))


def theta_prime_k(graph: CoverageGraph, k: int) -> float:
    """Fraction of regions with degree >= k."""
    n = len(graph.region_ids)
    if n == 0:
        warnings.warn("theta_prime_k on a graph without regions; returning 0")
        return 0.0
    return float(np.count_nonzero(graph.degrees() >= k)) / n


def k_lifetime(trace: MetricsTrace, k: int, lam: float, mode: str = "prefix") -> int:
    """Operational time with theta_k > lam.

    ``prefix``: longest run of periods from the start; ``last``: last period
    where the threshold was still exceeded.
    """
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    if not trace.rows:
        raise ValueError("empty trace")
    values = trace.column(f"theta{k}")
    if mode == "last":
        return max((r.period for r, v in zip(trace.rows, values) if v > lam), default=0)
    if mode != "prefix":
        raise ValueError(f"unknown k-lifetime mode {mode!r}")
    life = 0
    for r, v in zip(trace.rows, values):
        if v <= lam:
            break
        life = r.period
    return life


def verify_k_cover(awake: Iterable[int], alive: Iterable[int], graph: CoverageGraph, k: int) -> bool:
    """Every region that the alive nodes can k-cover is k-covered by the awake ones."""
    alive = set(alive)
    awake = set(awake) & alive
    feasible = graph.degrees(alive) >= k
    return bool(np.all(graph.degrees(awake)[feasible] >= k))


def is_nonredundant(awake: Iterable[int], graph: CoverageGraph, k: int) -> bool:
    """No single awake node can be dropped without breaking the cover.

    Coverage is monotone in the node set, so this single-removal test matches
    the any-proper-subset definition of a minimal cover.
    """
    awake = set(awake)
    alive = graph.sensor_ids
    if not verify_k_cover(awake, alive, graph, k):
        raise InvalidCoverError("awake set is not a k-cover of the feasible regions")
    return all(not verify_k_cover(awake - {s}, alive, graph, k) for s in awake)


def local_cover_violations(alive: Sequence[SensorNode], awake: Iterable[int], k: int,
                           template_for: Callable[[SensorNode], RegionTemplate]) -> list:
    """Check the pessimistic local model with full knowledge of the alive set.

    For each alive node the local graph is rebuilt against every other alive
    node; returns ``(node_id, cell_index)`` for cells with at least ``k``
    alive coverers but fewer than ``k`` awake ones.
    """
    awake = set(awake)
    alive = sorted(alive, key=lambda n: n.id)
    out = []
    for s in alive:
        others = [w for w in alive if w.id != s.id]
        g = local_subgraph(s, others, template_for(s))
        feasible = g.degrees() >= k
        short = feasible & (g.degrees(awake) < k)
        out.extend((s.id, int(c)) for c in np.flatnonzero(short))
    return out
