"""Period-driven simulation loop.

Every period: apply start-of-period failures, retire nodes that cannot pay
for another awake period, wake everybody, run the configured scheduler,
record metrics on the resulting awake set and finally charge awake nodes.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import rng
from .centralized import DEFAULT_ALPHA, centralized_schedule
from .cgs import DEFAULT_STD_C, DEFAULT_STD_MAX, ElectionResult, MessageKind, run_election
from .coverage import (DEFAULT_TEMPLATE_RESOLUTION, DEFAULT_TEMPLATE_TAU, SQRT2, CoverageGraph,
                       CoverageMode, Decision, NodeState, RegionGrid, SensorNode,
                       aligned_region_template, build_coverage_graph, distance_matrix,
                       local_region_template)
from .coverage import RegionTemplate
from .errors import ConfigurationError
from .metrics import MetricsRow, MetricsTrace, sample_lattice
from .random_sleep import RandomPolicy, random_schedule
from .topology import ExplicitTopology, GridTopology, UniformRandomTopology, generate_topology

log = logging.getLogger(__name__)

SCHEDULERS = ("cgs", "centralized", "random", "always_on")


class FaultPhase(Enum):
    START_OF_PERIOD = "start_of_period"
    AFTER_STD = "after_std"


@dataclass(frozen=True)
class FaultEvent:
    node: int
    period: int
    phase: FaultPhase = FaultPhase.START_OF_PERIOD


@dataclass(frozen=True)
class SimulationConfig:
    topology: object = field(default_factory=GridTopology)
    k: int = 3
    alpha: float = DEFAULT_ALPHA
    sensing_radius_m: float = 15.0
    comm_radius_m: float = 40.0
    initial_energy: float = 20.0
    awake_cost_per_period: float = 1.0
    message_energy_cost: float = 0.0
    max_periods: int = 40
    scheduler: str = "cgs"
    p_sleep: float = 0.4
    loss_probability: float = 0.0
    std_c: float = DEFAULT_STD_C
    std_max: float = DEFAULT_STD_MAX
    template_resolution: int = DEFAULT_TEMPLATE_RESOLUTION
    template_tau: float = DEFAULT_TEMPLATE_TAU
    # "area": templates snap to one lattice anchored at the target area origin; "node": node-centred
    template_alignment: str = "area"
    clip_templates_to_area: bool = True
    region_cell_side_m: float = 2.5
    metric_sample_spacing_m: float = 1.0
    seed: int = 0
    death_schedule: tuple = ()

    def validate(self) -> None:
        if not isinstance(self.topology, (GridTopology, UniformRandomTopology, ExplicitTopology)):
            raise ConfigurationError(f"unknown topology {self.topology!r}")
        self.topology.validate()
        if self.k < 1:
            raise ConfigurationError("k must be >= 1")
        if self.alpha <= 0:
            raise ConfigurationError("alpha must be positive")
        if self.sensing_radius_m <= 0 or self.comm_radius_m <= 0:
            raise ConfigurationError("radii must be positive")
        if self.initial_energy < 0 or self.awake_cost_per_period <= 0 or self.message_energy_cost < 0:
            raise ConfigurationError("energies must be non-negative and the awake cost positive")
        if self.max_periods < 0:
            raise ConfigurationError("max_periods must be >= 0")
        if self.scheduler not in SCHEDULERS:
            raise ConfigurationError(f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}")
        RandomPolicy(self.p_sleep)
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ConfigurationError("loss_probability must lie in [0, 1]")
        if self.std_c <= 0 or self.std_max <= 0:
            raise ConfigurationError("std_c and std_max must be positive")
        if self.template_resolution < 2 or self.template_tau <= 0:
            raise ConfigurationError("template_resolution must be >= 2 and template_tau positive")
        if self.template_alignment not in ("area", "node"):
            raise ConfigurationError("template_alignment must be 'area' or 'node'")
        if self.region_cell_side_m <= 0 or self.metric_sample_spacing_m <= 0:
            raise ConfigurationError("region cell side and sample spacing must be positive")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        for ev in self.death_schedule:
            if ev.phase is FaultPhase.AFTER_STD and self.scheduler != "cgs":
                raise ConfigurationError("after_std failures only exist under the cgs scheduler")
            if ev.period < 1 or ev.node < 0:
                raise ConfigurationError(f"bad fault event {ev}")
        if self.comm_radius_m < 2 * self.sensing_radius_m:
            msg = (f"comm radius {self.comm_radius_m} m is below twice the sensing radius "
                   f"{self.sensing_radius_m} m; k-coverage no longer implies connectivity")
            log.warning(msg)
            warnings.warn(msg, stacklevel=2)
        half = self.sensing_radius_m / self.template_resolution
        if (self.template_alignment == "area"
                and self.template_tau * self.sensing_radius_m < self.sensing_radius_m - SQRT2 * half):
            log.warning("template_tau %.3f leaves out cells a node covers pessimistically; "
                        "the CGS coverage guarantee no longer holds", self.template_tau)

    @property
    def levels(self) -> int:
        """Coverage levels recorded per period (at least 1..3)."""
        return max(3, self.k)


@dataclass(frozen=True)
class MessageLogEntry:
    period: int
    time: float
    kind: MessageKind
    sender: int
    receivers: int


@dataclass(frozen=True)
class PeriodRecord:
    period: int
    alive: frozenset
    awake: frozenset
    election: Optional[ElectionResult] = None


def broadcast(sender: SensorNode, msg, nodes: Sequence[SensorNode], loss_probability: float,
              generator: np.random.Generator) -> set:
    """Unit-disk broadcast with independent per-receiver loss."""
    others = [n for n in nodes if n.id != sender.id and n.state is not NodeState.DEAD]
    if not others:
        return set()
    xy = np.array([(n.position.x, n.position.y) for n in others])
    in_range = np.hypot(xy[:, 0] - sender.position.x, xy[:, 1] - sender.position.y) <= sender.comm_radius
    candidates = [n for n, ok in zip(others, in_range) if ok]
    if not candidates:
        return set()
    draws = generator.random(len(candidates))
    return {n.id for n, u in zip(candidates, draws) if u >= loss_probability}


class Simulator:
    def __init__(self, config: SimulationConfig):
        config.validate()
        self.config = config
        self.nodes = generate_topology(config.topology, config.seed, config.sensing_radius_m,
                                       config.comm_radius_m, config.initial_energy)
        self.area = config.topology.area()
        self.region_grid = RegionGrid.covering(self.area, config.region_cell_side_m)
        # exact-centre region graph over every deployed node
        self.region_graph: CoverageGraph = build_coverage_graph(
            self.nodes, self.region_grid, CoverageMode.EXACT_CENTER)
        pos = np.array([[n.position.x, n.position.y] for n in self.nodes])
        samples = sample_lattice(self.area, config.metric_sample_spacing_m)
        self.sample_incidence = distance_matrix(samples, pos) <= config.sensing_radius_m
        self._templates = {}
        self.energy = np.full(len(self.nodes), float(config.initial_energy))
        self.dead = np.zeros(len(self.nodes), dtype=bool)
        self.message_log: list = []
        self.history: list = []

    def template_for(self, node: SensorNode) -> RegionTemplate:
        t = self._templates.get(node.id)
        if t is None:
            c = self.config
            clip = self.area if c.clip_templates_to_area else None
            if c.template_alignment == "area":
                t = aligned_region_template(node.position, node.sensing_radius, c.template_resolution,
                                            c.template_tau, (self.area.x0, self.area.y0), clip)
            else:
                t = local_region_template(node.sensing_radius, c.template_resolution, c.template_tau)
                if clip is not None:
                    keep = [i for i, off in enumerate(t) if clip.contains(node.position + off)]
                    t = RegionTemplate(t.offsets[keep], t.half_side)
            self._templates[node.id] = t
        return t

    def _snapshot(self, i: int) -> SensorNode:
        n = self.nodes[i]
        state = NodeState.DEAD if self.dead[i] else NodeState.AWAKE
        return SensorNode(n.id, n.position, n.sensing_radius, n.comm_radius,
                          max(0.0, float(self.energy[i])), state)

    def _channel(self, period: int):
        counter = iter(range(1 << 62))
        c = self.config

        def channel(sender, msg, listeners):
            g = rng.substream(c.seed, rng.CHANNEL, period, next(counter))
            return broadcast(sender, msg, listeners, c.loss_probability, g)
        return channel

    def _row(self, period: int, alive: np.ndarray, awake: np.ndarray, messages: int) -> MetricsRow:
        L = self.config.levels
        point_counts = self.sample_incidence[:, awake].sum(axis=1)
        cell_counts = self.region_graph.incidence[:, awake].sum(axis=1)
        theta = tuple(round(float(np.mean(point_counts >= k)), 6) for k in range(1, L + 1))
        theta_p = tuple(round(float(np.mean(cell_counts >= k)), 6) for k in range(1, L + 1))
        return MetricsRow(period, int(alive.sum()), int(awake.sum()), theta, theta_p, messages)

    def step(self, period: int) -> MetricsRow:
        c = self.config
        for ev in c.death_schedule:
            if ev.period == period and ev.phase is FaultPhase.START_OF_PERIOD and ev.node < len(self.nodes):
                self.dead[ev.node] = True
        self.dead |= self.energy < c.awake_cost_per_period
        alive_idx = np.flatnonzero(~self.dead)
        alive_nodes = [self._snapshot(i) for i in alive_idx]
        awake_ids: frozenset = frozenset()
        election = None
        messages = 0
        if alive_nodes:
            if c.scheduler == "cgs":
                after_std = [ev.node for ev in c.death_schedule
                             if ev.period == period and ev.phase is FaultPhase.AFTER_STD]
                election = run_election(alive_nodes, self._channel(period), c.k, self.template_for,
                                        c.alpha, c.std_c, c.std_max, after_std)
                for d in election.died:
                    self.dead[d] = True
                awake_ids = election.awake
                messages = len(election.messages)
                for m in election.messages:
                    self.message_log.append(MessageLogEntry(period, m.time, m.kind, m.sender, len(m.receivers)))
                    if c.message_energy_cost:
                        self.energy[m.sender] -= c.message_energy_cost
            elif c.scheduler == "centralized":
                graph = self.region_graph.restricted_to(n.id for n in alive_nodes)
                awake_ids = centralized_schedule(alive_nodes, graph, c.k, c.alpha).awake
            elif c.scheduler == "random":
                decisions = random_schedule(RandomPolicy(c.p_sleep), alive_nodes, c.seed, period)
                awake_ids = frozenset(i for i, d in decisions.items() if d is Decision.AWAKE)
            else:
                awake_ids = frozenset(n.id for n in alive_nodes)
        alive = ~self.dead
        awake = np.zeros(len(self.nodes), dtype=bool)
        awake[list(awake_ids)] = True
        awake &= alive
        row = self._row(period, alive, awake, messages)
        self.history.append(PeriodRecord(period, frozenset(np.flatnonzero(alive).tolist()),
                                         frozenset(np.flatnonzero(awake).tolist()), election))
        self.energy[awake] -= c.awake_cost_per_period
        np.maximum(self.energy, 0.0, out=self.energy)
        return row

    def run(self) -> MetricsTrace:
        trace = MetricsTrace()
        for period in range(1, self.config.max_periods + 1):
            trace.rows.append(self.step(period))
        return trace


def run_simulation(config: SimulationConfig) -> MetricsTrace:
    return Simulator(config).run()
