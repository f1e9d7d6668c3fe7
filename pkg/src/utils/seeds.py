# src/utils/seeds.py
"""Seed splitting.

Every random task gets its own generator derived from one 64-bit master seed
and an integer key path: ``split_seed(master, n, sampler_code, index)``. The
same key path always yields the same stream, so results do not depend on how
tasks are distributed over workers.
"""
import random
from typing import Tuple

import numpy as np


def seed_sequence(master: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=int(master) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in key)
    )


def _state_to_int(seq: np.random.SeedSequence) -> int:
    out = 0
    for word in seq.generate_state(4, dtype=np.uint32):
        out = (out << 32) | int(word)
    return out


def split_seed(master: int, *key: int) -> int:
    """Deterministic 128-bit child seed for the task identified by ``key``."""
    return _state_to_int(seed_sequence(master, *key))


def make_generators(master: int, *key: int) -> Tuple[np.random.Generator, random.Random]:
    """numpy generator for shuffles and floats, plus a big-integer capable
    ``random.Random`` for exact draws against count tables."""
    np_child, big_child = seed_sequence(master, *key).spawn(2)
    return np.random.Generator(np.random.PCG64(np_child)), random.Random(_state_to_int(big_child))
