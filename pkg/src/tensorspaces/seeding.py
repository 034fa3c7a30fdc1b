"""Deterministic, named random streams.

Every stream is a Philox4x64 counter-based generator keyed by a 128-bit
value: the high 64 bits are the user seed, the low 64 bits are the FNV-1a
hash of a tag tuple naming the stream, e.g. ``("split", 3, "class07")``.
Identical seed and tags reproduce identical draws regardless of the order
in which streams are created or consumed, which is what makes sweep cells
independent and safely parallelizable.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream_key", "rng_for"]

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def stream_key(seed, tags):
    """128-bit Philox key: (seed mod 2^64) << 64 | fnv1a64("tag|tag|...")."""
    label = "|".join(str(t) for t in tags)
    return ((int(seed) & _MASK64) << 64) | _fnv1a64(label.encode("utf-8"))


def rng_for(seed, *tags):
    """Generator for the stream named by ``tags`` under ``seed``."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, tags)))
