"""Reproducible random streams.

Streams are derived counter-style from ``(root_seed, *ids)`` through
``numpy.random.SeedSequence``, so replica k's generator is addressable
without instantiating streams 0..k-1.  Two streams with distinct id tuples
are statistically independent, and a given ``(root_seed, ids)`` pair
reproduces the same draws bit-for-bit on every platform numpy supports.

Workers never share a stream: parallel experiments assign one stream per
chunk index, which makes results independent of the worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SeededStream:
    """Addressable random stream: root seed plus a tuple of sub-ids."""

    root_seed: int
    ids: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.default_rng(np.random.SeedSequence([self.root_seed, *self.ids]))

    def child(self, *ids: int) -> "SeededStream":
        return SeededStream(self.root_seed, self.ids + tuple(int(i) for i in ids))


def stream(root_seed: int, *ids: int) -> np.random.Generator:
    """Shorthand: generator for ``SeededStream(root_seed, ids)``."""
    return SeededStream(int(root_seed), tuple(int(i) for i in ids)).generator()
