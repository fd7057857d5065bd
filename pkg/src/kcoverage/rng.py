"""Named, order-independent random substreams derived from the run seed."""
import numpy as np

TOPOLOGY = 1
RANDOM_SLEEP = 2
CHANNEL = 3


def substream(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and substream keys must be non-negative")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))
