"""Seedable random streams with deterministic splitting."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np


class RngStream:
    """A reproducible stream identified by ``(seed, stream)``.

    Scalar draws go through :class:`random.Random` (cheap per call, exact
    big-integer ranges); bulk draws go through a numpy ``Generator``.  Both
    are seeded from the same ``SeedSequence`` so a stream is a pure function
    of its identifiers.
    """

    def __init__(self, seed: int = 0, stream: int | tuple[int, ...] = ()):
        if isinstance(stream, int):
            stream = (stream,)
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        words = ss.generate_state(4, dtype=np.uint64)
        self.py = random.Random(int.from_bytes(words.tobytes(), "little"))
        self.np = np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.stream + tuple(key))

    def randrange(self, n: int) -> int:
        return self.py.randrange(n)

    def bernoulli(self, p) -> bool:
        """Exact Bernoulli trial for a rational ``p`` in [0, 1]."""
        p = Fraction(p)
        if p <= 0:
            return False
        if p >= 1:
            return True
        return self.py.randrange(p.denominator) < p.numerator

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(0)
    return RngStream(int(rng))
