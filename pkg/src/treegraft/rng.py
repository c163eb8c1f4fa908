"""Portable deterministic random number generation.

Experiment splits must be reproducible bit-for-bit on every platform, so
this module implements xoshiro256** (Blackman & Vigna) in pure integer
arithmetic instead of relying on a host generator.  The 256-bit state is
expanded from a single 64-bit seed with SplitMix64, the seeding procedure
recommended by the generator's authors.  Bounded integers use rejection
sampling, so shuffles are free of modulo bias.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1


def splitmix64(seed: int):
    """Yield the SplitMix64 stream for ``seed`` (used only for state setup)."""
    x = seed & MASK64
    while True:
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield (z ^ (z >> 31)) & MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded from one 64-bit integer via SplitMix64."""

    def __init__(self, seed: int):
        stream = splitmix64(seed)
        self._s = [next(stream) for _ in range(4)]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), rejection-sampled."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def normal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        """Gaussian deviate via the polar (Marsaglia) method."""
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return mean + sd * u * math.sqrt(-2.0 * math.log(s) / s)

    def choice(self, items):
        return items[self.below(len(items))]
