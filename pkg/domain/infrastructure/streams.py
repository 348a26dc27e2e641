from enum import Enum

import numpy as np


class Stream(Enum):
    Hitting = 0
    Dufresne = 1
    DufresneRight = 2
    Perpetuity = 3
    Martingale = 4


def substream(seed, stream_id, role, index):
    """Generator of one batch, independent across all four keys."""
    sequence = np.random.SeedSequence(
        seed, spawn_key=(stream_id, role.value, index))
    return np.random.Generator(np.random.PCG64(sequence))
