from __future__ import annotations

from dataclasses import dataclass

from . import rng
from .coverage import Point2D, Rect, SensorNode
from .errors import ConfigurationError


@dataclass(frozen=True)
class GridTopology:
    rows: int = 10
    cols: int = 10
    spacing_m: float = 10.0

    kind = "grid"

    def area(self) -> Rect:
        return Rect(0.0, 0.0, (self.cols - 1) * self.spacing_m, (self.rows - 1) * self.spacing_m)

    def validate(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigurationError("grid topology needs at least one node")
        if self.spacing_m <= 0:
            raise ConfigurationError("grid spacing must be positive")


@dataclass(frozen=True)
class UniformRandomTopology:
    n: int = 50
    width_m: float = 100.0
    height_m: float = 100.0

    kind = "uniform_random"

    def area(self) -> Rect:
        return Rect(0.0, 0.0, self.width_m, self.height_m)

    def validate(self):
        if self.n < 1:
            raise ConfigurationError("uniform topology needs at least one node")
        if self.width_m <= 0 or self.height_m <= 0:
            raise ConfigurationError("deployment area must have positive size")


@dataclass(frozen=True)
class ExplicitTopology:
    """Hand-placed nodes, ids in the given order (scripted scenarios)."""

    positions: tuple = ((0.0, 0.0),)
    width_m: float = 100.0
    height_m: float = 100.0

    kind = "explicit"

    def area(self) -> Rect:
        return Rect(0.0, 0.0, self.width_m, self.height_m)

    def validate(self):
        if not self.positions:
            raise ConfigurationError("explicit topology needs at least one position")
        if self.width_m <= 0 or self.height_m <= 0:
            raise ConfigurationError("deployment area must have positive size")


def generate_topology(topology, seed: int, sensing_radius: float, comm_radius: float,
                      energy: float) -> list:
    """Place nodes; grid ids are row-major from the origin."""
    topology.validate()
    if isinstance(topology, GridTopology):
        positions = [(c * topology.spacing_m, r * topology.spacing_m)
                     for r in range(topology.rows) for c in range(topology.cols)]
    elif isinstance(topology, UniformRandomTopology):
        g = rng.substream(seed, rng.TOPOLOGY)
        xy = g.random((topology.n, 2)) * [topology.width_m, topology.height_m]
        positions = [tuple(p) for p in xy]
    elif isinstance(topology, ExplicitTopology):
        positions = [tuple(p) for p in topology.positions]
    else:
        raise ConfigurationError(f"unknown topology {topology!r}")
    return [SensorNode(i, Point2D(float(x), float(y)), sensing_radius, comm_radius, energy)
            for i, (x, y) in enumerate(positions)]
