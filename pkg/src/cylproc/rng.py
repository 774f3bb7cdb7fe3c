"""Reproducible random streams.

All randomness in the package flows through Philox, a counter-based 64-bit
generator whose output is a pure function of (key, counter).  A stream is
addressed by the pair (seed, stream): the two words are loaded directly into
the Philox key, so distinct pairs give statistically independent streams and
the same pair reproduces the same sequence on every platform.

Estimators split work by assigning one stream per replicate (stream id =
replicate-derived index), which makes results independent of worker count
and scheduling order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the (seed, stream) pair; same pair, same sequence."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
