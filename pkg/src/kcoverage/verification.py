"""Randomized property and oracle suites on small instances.

Shared by the ``verify`` CLI subcommand and the acceptance tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .centralized import centralized_schedule
from .cgs import run_election
from .coverage import (CoverageMode, Point2D, Rect, RegionGrid, SensorNode, aligned_region_template,
                       build_coverage_graph, local_region_template)
from .engine import FaultEvent, FaultPhase, SimulationConfig, Simulator, broadcast
from .metrics import is_nonredundant, local_cover_violations, verify_k_cover
from .topology import ExplicitTopology

VERIFY_STREAM = 97


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {len(self.violations)} violations"


def centralized_instance(seed: int, max_nodes: int = 15, max_regions: int = 40):
    """Random instance where every region is k-coverable by the deployed nodes.

    Returns ``(nodes, graph, k, alpha)``; nodes that cover no region are dropped.
    """
    g = rng.substream(seed, VERIFY_STREAM, 1)
    while True:
        side = float(g.choice([5.0, 6.0]))
        cols = int(g.integers(3, 7))
        rows = int(g.integers(3, max(3, min(7, max_regions // cols)) + 1))
        if rows * cols > max_regions:
            continue
        area = Rect(0.0, 0.0, cols * side, rows * side)
        grid = RegionGrid.covering(area, side)
        n = int(g.integers(4, max_nodes + 1))
        k = int(g.integers(1, 4))
        radius = float(g.uniform(8.0, 16.0))
        xy = g.random((n, 2)) * [area.width, area.height]
        energies = g.integers(1, 21, size=n).astype(float)
        nodes = [SensorNode(i, Point2D(*xy[i]), radius, 2 * radius, energies[i]) for i in range(n)]
        graph = build_coverage_graph(nodes, grid, CoverageMode.EXACT_CENTER)
        if np.all(graph.degrees() >= k):
            keep = [nd for nd in nodes if graph.regions_of(nd.id)]
            return keep, graph.restricted_to(nd.id for nd in keep), k, float(g.choice([1.0, 2.0, 3.0]))


def check_centralized(n_instances: int = 100, seed: int = 0) -> SuiteResult:
    res = SuiteResult("centralized schedule is a non-redundant k-cover")
    for i in range(n_instances):
        nodes, graph, k, alpha = centralized_instance(seed * 100003 + i)
        sched = centralized_schedule(nodes, graph, k, alpha)
        alive = [n.id for n in nodes]
        ok = verify_k_cover(sched.awake, alive, graph, k) and is_nonredundant(sched.awake, graph, k)
        res.cases += 1
        if not ok:
            res.violations.append(i)
    return res


@dataclass
class ElectionCase:
    nodes: list
    area: Rect
    k: int
    loss: float
    seed: int

    def template_for(self, node):
        return aligned_region_template(node.position, node.sensing_radius, 6, 0.86,
                                       (self.area.x0, self.area.y0), self.area)


def election_case(seed: int) -> ElectionCase:
    """Grid or uniform deployment of 20-100 nodes with random energies and loss in [0, 0.3]."""
    g = rng.substream(seed, VERIFY_STREAM, 2)
    R = 15.0
    if g.random() < 0.5:
        rows = int(g.integers(4, 11))
        cols = int(g.integers(max(2, -(-20 // rows)), 11))
        spacing = float(g.choice([7.0, 8.0, 10.0, 12.0]))
        xy = np.array([(c * spacing, r * spacing) for r in range(rows) for c in range(cols)], float)
        area = Rect(0.0, 0.0, (cols - 1) * spacing, (rows - 1) * spacing)
    else:
        n = int(g.integers(20, 101))
        w = float(g.uniform(40.0, 100.0))
        xy = g.random((n, 2)) * w
        area = Rect(0.0, 0.0, w, w)
    energies = g.integers(1, 21, size=len(xy)).astype(float)
    nodes = [SensorNode(i, Point2D(*xy[i]), R, 40.0, energies[i]) for i in range(len(xy))]
    return ElectionCase(nodes, area, int(g.integers(1, 4)), float(g.uniform(0.0, 0.3)), seed)


def run_case(case: ElectionCase, die_after_std=()):
    counter = iter(range(1 << 30))

    def channel(sender, msg, listeners):
        return broadcast(sender, msg, listeners, case.loss,
                         rng.substream(case.seed, VERIFY_STREAM, 3, next(counter)))

    return run_election(case.nodes, channel, case.k, case.template_for, die_after_std=die_after_std)


def message_bound_violations(result) -> list:
    """Nodes sending more than three messages, or sleepers not sending exactly two."""
    bad = []
    sleepers = result.asleep
    for nid in result.decisions:
        sent = result.sent_by(nid)
        if sent > 3 or (nid in sleepers and sent != 2):
            bad.append(nid)
    return bad


def check_cgs_safety(n_elections: int = 200, seed: int = 0) -> tuple:
    """Coverage guarantee of the pessimistic local model under message loss,
    plus the per-node message bound.  Returns two SuiteResults."""
    cover = SuiteResult("CGS keeps pessimistic k-coverage under message loss")
    msgs = SuiteResult("CGS sends at most 3 messages per node, sleepers exactly 2")
    for i in range(n_elections):
        case = election_case(seed * 100003 + i)
        result = run_case(case)
        v = local_cover_violations(case.nodes, result.awake, case.k, case.template_for)
        cover.cases += 1
        msgs.cases += 1
        if v:
            cover.violations.append((i, v[:5]))
        m = message_bound_violations(result)
        if m:
            msgs.violations.append((i, m))
    return cover, msgs


# Two co-located nodes (ids 0 and 1) share one patch, three more share another.
# With equal energy node 0 fires first and sleeps relying on node 1.
CRITICAL_PAIR_POSITIONS = ((20.0, 20.0), (20.0, 20.0), (70.0, 70.0), (70.0, 70.0), (70.0, 70.0))
CRITICAL_PAIR_TAU = 0.75  # keeps every template cell inside the co-located partner's pessimistic disk


def critical_pair_config(phase: FaultPhase) -> SimulationConfig:
    return SimulationConfig(
        topology=ExplicitTopology(CRITICAL_PAIR_POSITIONS, 100.0, 100.0), k=1, max_periods=1,
        scheduler="cgs", template_alignment="node", template_tau=CRITICAL_PAIR_TAU,
        clip_templates_to_area=False, death_schedule=(FaultEvent(1, 1, phase),))


def critical_pair_violations(phase: FaultPhase) -> list:
    sim = Simulator(critical_pair_config(phase))
    sim.run()
    rec = sim.history[0]
    alive = [n for n in sim.nodes if n.id in rec.alive]
    return local_cover_violations(alive, rec.awake, sim.config.k, sim.template_for)


def check_death_after_std() -> SuiteResult:
    res = SuiteResult("death after STD can break coverage; death before the round cannot", cases=2)
    if not critical_pair_violations(FaultPhase.AFTER_STD):
        res.violations.append("after_std death produced no violation")
    if critical_pair_violations(FaultPhase.START_OF_PERIOD):
        res.violations.append("start_of_period death produced a violation")
    return res


def run_all(quick: bool = False) -> list:
    n = 20 if quick else 100
    cover, msgs = check_cgs_safety(40 if quick else 200)
    return [check_centralized(n), cover, msgs, check_death_after_std()]
