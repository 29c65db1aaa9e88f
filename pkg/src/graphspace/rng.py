"""Seeding policy.

All randomness flows through numpy's PCG64 bit generator, keyed by a
``(seed, stream)`` pair of 64-bit integers fed to ``SeedSequence``.
PCG64 output is stable across platforms, so identical ``(seed, stream)``
pairs reproduce identical draws bit-for-bit.

Batch producers derive one stream per graph as ``stream = base ^ index``,
which keeps parallel generation order-independent: graph ``i`` of a batch
sees the same draws no matter which worker produces it.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def graph_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream) pair."""
    ss = np.random.SeedSequence([seed & _MASK64, stream & _MASK64])
    return np.random.Generator(np.random.PCG64(ss))


def derived_stream(base: int, index: int) -> int:
    """Per-item stream id within a batch: ``base ^ index``."""
    return (base ^ index) & _MASK64
