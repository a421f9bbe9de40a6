"""Counter-based random streams.

A stream is addressed by ``(seed, stream, block)``; the Philox counter is set
from the address, so the values of a block never depend on which worker
draws them or in what order blocks are visited.
"""
from __future__ import annotations

import numpy as np

KEY_MASK = (1 << 128) - 1

SIMULATION_STREAM = 1
EQUIVALENCE_STREAM = 2


def make_generator(seed: int, stream: int = SIMULATION_STREAM, block: int = 0) -> np.random.Generator:
    if stream < 0 or block < 0:
        raise ValueError("stream and block must be non-negative")
    bit_generator = np.random.Philox(key=int(seed) & KEY_MASK, counter=[0, 0, block, stream])
    return np.random.Generator(bit_generator)
