"""Counter-based random streams.

Every random quantity in the package is drawn from a stream keyed by
``(seed, purpose, *index)``.  Streams are Philox generators, so two draws
with the same key are identical no matter which process or in which order
they are requested.
"""
import os
import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def resolve_seed(seed=None):
    """Return an integer seed, falling back to ``$SERIATE_SEED`` then 0."""
    if seed is None:
        seed = os.environ.get("SERIATE_SEED", 0)
    return int(seed) & _MASK64


def stream(seed, purpose, *index):
    """Independent generator for ``(seed, purpose, index...)``."""
    key = (zlib.crc32(purpose.encode("utf-8")),) + tuple(int(i) for i in index)
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))
