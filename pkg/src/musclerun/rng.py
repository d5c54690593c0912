"""Seeded random streams used for course generation.

The generator is splitmix64, chosen because it is trivially portable and
bit-exact everywhere: the whole state is one 64-bit integer and every draw
is a handful of integer multiplies and xor-shifts.  Uniform doubles take
the top 53 bits of a draw; exponentials come from inversion sampling.
"""

from __future__ import annotations

import math

MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic unsigned-64 stream seeded once."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) from the top 53 bits of one draw."""
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + (hi - lo) * u

    def exponential(self, mean: float) -> float:
        """Exponential variate with the given mean, by inversion."""
        return -mean * math.log(1.0 - self.uniform())
