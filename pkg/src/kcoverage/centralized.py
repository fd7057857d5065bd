"""Centralized drowsiness-greedy scheduler."""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .coverage import CoverageGraph, SensorNode

DEFAULT_ALPHA = 2.0


class Schedule(NamedTuple):
    awake: frozenset
    asleep: frozenset
    sleep_order: tuple = ()


def coverage_ratio(c_r: int, k: int) -> float:
    if c_r > k:
        return 1.0 / (c_r - k)
    return -1.0


def drowsiness(E_s: float, alpha: float, adjacent_ratios: Sequence[float]) -> float:
    """Sleep priority of a node; -1 means it has to stay awake."""
    if len(adjacent_ratios) == 0 or any(r <= 0 for r in adjacent_ratios):
        return -1.0
    return sum(adjacent_ratios) / E_s ** alpha


def coverage_ratios(degrees: np.ndarray, k: int) -> np.ndarray:
    degrees = np.asarray(degrees)
    over = degrees > k
    out = np.full(degrees.shape, -1.0)
    out[over] = 1.0 / (degrees[over] - k)
    return out


def drowsiness_vector(incidence: np.ndarray, energies: np.ndarray, k: int, alpha: float,
                      active: np.ndarray | None = None) -> np.ndarray:
    """Drowsiness of every column of ``incidence`` given the active columns.

    Inactive columns get -1.
    """
    inc = np.asarray(incidence, dtype=bool)
    if active is None:
        active = np.ones(inc.shape[1], dtype=bool)
    sub = inc & active[None, :]
    phi = coverage_ratios(sub.sum(axis=1), k)
    blocked = (sub & (phi <= 0)[:, None]).any(axis=0)
    has_region = sub.any(axis=0)
    total = (sub * np.where(phi > 0, phi, 0.0)[:, None]).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = total / np.asarray(energies, dtype=float) ** alpha
    return np.where(active & has_region & ~blocked, d, -1.0)


def centralized_schedule(alive: Sequence[SensorNode], graph: CoverageGraph, k: int,
                         alpha: float = DEFAULT_ALPHA) -> Schedule:
    """Send nodes to sleep one at a time, always the one with the largest
    positive drowsiness (lowest id on ties), recomputing after every step."""
    by_id = {n.id: n for n in alive}
    ids = [s for s in graph.sensor_ids if s in by_id]
    g = graph.restricted_to(ids)
    energies = np.array([by_id[s].energy for s in g.sensor_ids], dtype=float)
    id_arr = np.array(g.sensor_ids, dtype=np.int64)
    active = np.ones(len(ids), dtype=bool)
    order = []
    while True:
        d = drowsiness_vector(g.incidence, energies, k, alpha, active)
        best = d.max(initial=-1.0)
        if best <= 0:
            break
        j = int(np.flatnonzero(d == best)[np.argmin(id_arr[d == best])])
        active[j] = False
        order.append(int(id_arr[j]))
    asleep = frozenset(order)
    awake = frozenset(n.id for n in alive) - asleep
    return Schedule(awake, asleep, tuple(order))
