"""Seeding.

All randomness goes through ``numpy.random.Generator(PCG64(seed))`` (128-bit
state, period 2**128). Independent per-trial streams are derived from a
master seed with the SplitMix64 finalizer, so a trial's stream depends only
on ``(master_seed, *indices)`` and never on scheduling.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    """SplitMix64 output function applied to ``x + golden``."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *indices):
    """Fold ``indices`` into ``master`` one SplitMix64 round at a time."""
    s = splitmix64(int(master) & MASK64)
    for idx in indices:
        s = splitmix64(s ^ (int(idx) & MASK64))
    return s


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
