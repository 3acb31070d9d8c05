"""Deterministic splittable random streams.

Streams are counter-based (Philox) generators keyed by a master seed plus an
integer path, so independent trials or blocks can be generated in any order
or in parallel and still reproduce bit-identically.
"""

from __future__ import annotations

import numpy as np

__all__ = ["seed_stream", "child_seed"]


def seed_stream(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by (master_seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(master_seed: int, *path: int) -> int:
    """A 63-bit integer seed derived from (master_seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0] >> 1)
