"""Counter-based random streams (Philox) for reproducible experiments.

Every stochastic routine takes an explicit 64-bit seed.  Substreams are
keyed by (seed, stream-id, index), so a quantity attached to an edge or a
Monte Carlo trial depends only on those keys and never on traversal or
scheduling order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Fixed stream ids, one per consumer, so substreams never collide.
EDGE_STREAM = 1
WALK_STREAM = 2
PERC_STREAM = 3
SEARCH_STREAM = 4
GAME_STREAM = 5


def stream_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Generator for substream (seed, stream, index).

    stream must be < 2**16 and index < 2**48; they are packed into the
    second Philox key word.
    """
    if not 0 <= stream < (1 << 16):
        raise ValueError(f"stream id out of range: {stream}")
    if not 0 <= index < (1 << 48):
        raise ValueError(f"stream index out of range: {index}")
    key = np.array([seed & _MASK64, ((stream << 48) | index) & _MASK64],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(seed: int, stream: int, n: int, index: int = 0) -> np.ndarray:
    """n uniforms on (0, 1] from the given substream.

    The half-open flip (1 - U) keeps 1.0 inside the support, which the
    conductance sampler relies on (its t = u**(-1/(1-lam)) needs u > 0).
    """
    return 1.0 - stream_rng(seed, stream, index).random(n)
