"""Reproducible RNG stream derivation.

Every stochastic component draws from its own ``numpy.random.Generator``
whose ``SeedSequence`` entropy is the tuple (user seed, stream tag, ...key).
Distinct keys give statistically independent streams, and a fixed key always
reproduces the same stream, which is what makes replicates embarrassingly
parallel and runs bit-reproducible regardless of scheduling.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, Sequence[int]]

# Stream tags. SIM feeds simulation replicates, BOOT feeds bootstrap
# resampling ("bootstrap" spelled as an integer so SeedSequence accepts it).
SIM_STREAM = 0
BOOT_STREAM = int.from_bytes(b"bootstrap", "big")


def _as_key(seed: SeedLike) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(x) for x in seed)


def stream_rng(seed: SeedLike, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    return np.random.default_rng(list(_as_key(seed)) + [int(k) for k in key])


def sim_rng(seed: SeedLike, replicate_index: int) -> np.random.Generator:
    """Per-replicate simulation stream."""
    return stream_rng(seed, SIM_STREAM, replicate_index)


def bootstrap_rng(seed: SeedLike) -> np.random.Generator:
    """Bootstrap resampling stream, independent of simulation streams."""
    return stream_rng(seed, BOOT_STREAM)
