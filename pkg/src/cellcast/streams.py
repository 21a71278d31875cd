"""Deterministic substream derivation for reproducible experiments.

A master seed plus a tuple of stream indices identifies one independent
random stream. The same (seed, indices) always yields a bit-identical
generator state, so realizations can be computed in any order (or
concurrently) without changing results.
"""

from __future__ import annotations

import numpy as np


def substream(master_seed: int, *indices: int) -> np.random.Generator:
    """Return an independent generator for the given (seed, indices) key."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(indices))
    return np.random.default_rng(seq)
