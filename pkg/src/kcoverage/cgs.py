"""Controlled Greedy Sleep: the distributed election run once per period.

Each node learns its alive neighbours from Hello messages, scores itself on
its local graph, announces a shout time delay (STD) and, when its timer
fires, sleeps only if the not-yet-decided neighbours with a later timer plus
the neighbours already known to be awake can k-cover all of its cells.
Staying awake is announced with an Awake message.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .centralized import DEFAULT_ALPHA, drowsiness_vector
from .coverage import CoverageGraph, Decision, Point2D, RegionTemplate, SensorNode, local_subgraph

DEFAULT_STD_C = 0.01
DEFAULT_STD_MAX = 10.0


class MessageKind(Enum):
    HELLO = "hello"
    STD = "std"
    AWAKE = "awake"


@dataclass(frozen=True)
class ProtocolMessage:
    kind: MessageKind
    sender: int
    payload: Optional[object] = None

    @classmethod
    def hello(cls, sender: int, position: Point2D):
        return cls(MessageKind.HELLO, sender, position)

    @classmethod
    def std(cls, sender: int, delay: float):
        return cls(MessageKind.STD, sender, float(delay))

    @classmethod
    def awake(cls, sender: int):
        return cls(MessageKind.AWAKE, sender)


@dataclass
class NeighborInfo:
    position: Point2D
    std: Optional[float] = None


@dataclass
class CgsNodeState:
    node: SensorNode
    neighbor_table: dict = field(default_factory=dict)
    lan: set = field(default_factory=set)
    own_std: float = 0.0
    own_drowsiness: float = -1.0
    decision: Decision = Decision.UNDECIDED

    def receive(self, msg: ProtocolMessage) -> None:
        if msg.sender == self.node.id:
            return
        if msg.kind is MessageKind.HELLO:
            self.neighbor_table[msg.sender] = NeighborInfo(msg.payload)
        elif msg.kind is MessageKind.STD:
            info = self.neighbor_table.get(msg.sender)
            if info is not None:
                info.std = msg.payload
        elif msg.kind is MessageKind.AWAKE:
            # an AM from a node we never heard a Hello from is useless: no position
            if msg.sender in self.neighbor_table:
                self.lan.add(msg.sender)

    def neighbors(self) -> list:
        """Known neighbours as nodes sharing this node's radii (homogeneous model)."""
        me = self.node
        return [SensorNode(nid, info.position, me.sensing_radius, me.comm_radius, 0.0)
                for nid, info in sorted(self.neighbor_table.items())]

    def fires_after_me(self, other: int) -> bool:
        info = self.neighbor_table[other]
        if info.std is None:
            return False
        return (info.std, other) > (self.own_std, self.node.id)

    def set_decision(self, decision: Decision) -> None:
        if self.decision is not Decision.UNDECIDED:
            raise RuntimeError(f"node {self.node.id} already decided {self.decision}")
        self.decision = decision


def std_from_drowsiness(D_s: float, c: float = DEFAULT_STD_C, std_max: float = DEFAULT_STD_MAX) -> float:
    if D_s <= 0:
        return 0.0
    return min(c / D_s, std_max)


def cgs_decide(state: CgsNodeState, local_graph: CoverageGraph, k: int) -> Decision:
    me = state.node.id
    available = set(state.lan)
    available.update(w for w in state.neighbor_table if w not in available and state.fires_after_me(w))
    available.discard(me)
    counts = local_graph.degrees(available)
    if np.all(counts >= k):
        return Decision.SLEEP
    return Decision.AWAKE


@dataclass(frozen=True)
class MessageRecord:
    time: float
    kind: MessageKind
    sender: int
    receivers: tuple


@dataclass
class ElectionResult:
    decisions: dict
    messages: list
    drowsiness: dict
    std: dict
    died: frozenset = frozenset()

    @property
    def awake(self) -> frozenset:
        return frozenset(n for n, d in self.decisions.items() if d is Decision.AWAKE)

    @property
    def asleep(self) -> frozenset:
        return frozenset(n for n, d in self.decisions.items() if d is Decision.SLEEP)

    def sent_by(self, node_id: int) -> int:
        return sum(1 for m in self.messages if m.sender == node_id)


# channel(sender, message, listeners) -> ids of listeners that received it
Channel = Callable[[SensorNode, ProtocolMessage, Sequence[SensorNode]], Iterable[int]]
TemplateFn = Callable[[SensorNode], RegionTemplate]


def run_election(nodes: Sequence[SensorNode], channel: Channel, k: int, template_for: TemplateFn,
                 alpha: float = DEFAULT_ALPHA, std_c: float = DEFAULT_STD_C,
                 std_max: float = DEFAULT_STD_MAX, die_after_std: Iterable[int] = ()) -> ElectionResult:
    """One election round over the alive ``nodes``.

    ``die_after_std`` lists nodes that fail right after sending their STD:
    they never decide, never send an Awake message and stop listening.
    """
    nodes = sorted(nodes, key=lambda n: n.id)
    states = {n.id: CgsNodeState(n) for n in nodes}
    listening = list(nodes)
    log = []

    def send(sender: SensorNode, msg: ProtocolMessage, t: float):
        got = tuple(sorted(channel(sender, msg, listening)))
        for r in got:
            states[r].receive(msg)
        log.append(MessageRecord(t, msg.kind, sender.id, got))

    for n in nodes:
        send(n, ProtocolMessage.hello(n.id, n.position), 0.0)

    graphs = {}
    for n in nodes:
        st = states[n.id]
        g = local_subgraph(n, st.neighbors(), template_for(n))
        graphs[n.id] = g
        energies = np.full(len(g.sensor_ids), n.energy)
        st.own_drowsiness = float(drowsiness_vector(g.incidence, energies, k, alpha)[0])
        st.own_std = std_from_drowsiness(st.own_drowsiness, std_c, std_max)

    for n in nodes:
        send(n, ProtocolMessage.std(n.id, states[n.id].own_std), 0.0)

    died = frozenset(die_after_std) & set(states)
    listening = [n for n in nodes if n.id not in died]

    decisions = {}
    for n in sorted(listening, key=lambda n: (states[n.id].own_std, n.id)):
        st = states[n.id]
        decision = cgs_decide(st, graphs[n.id], k)
        st.set_decision(decision)
        decisions[n.id] = decision
        if decision is Decision.AWAKE:
            send(n, ProtocolMessage.awake(n.id), st.own_std)

    return ElectionResult(
        decisions=decisions,
        messages=log,
        drowsiness={i: s.own_drowsiness for i, s in states.items()},
        std={i: s.own_std for i, s in states.items()},
        died=died,
    )
