"""Randomized independent sleeping: every node flips its own coin each period."""
from __future__ import annotations

from dataclasses import dataclass

from . import rng
from .coverage import Decision, SensorNode
from .errors import ConfigurationError


@dataclass(frozen=True)
class RandomPolicy:
    p_sleep: float

    def __post_init__(self):
        if not 0.0 <= self.p_sleep <= 1.0:
            raise ConfigurationError(f"p_sleep must lie in [0, 1], got {self.p_sleep}")


def decide_random(policy: RandomPolicy, node: SensorNode, draw: float) -> Decision:
    return Decision.SLEEP if draw < policy.p_sleep else Decision.AWAKE


def sleep_draw(seed: int, node_id: int, period: int) -> float:
    """Uniform [0, 1) draw owned by one node in one period."""
    return float(rng.substream(seed, rng.RANDOM_SLEEP, node_id, period).random())


def random_schedule(policy: RandomPolicy, nodes, seed: int, period: int) -> dict:
    return {n.id: decide_random(policy, n, sleep_draw(seed, n.id, period)) for n in nodes}
