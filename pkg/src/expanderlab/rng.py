"""Deterministic, splittable random streams (SplitMix64).

Every sampling phase in the package draws from its own `Stream`, derived from
the user seed with `split`. The generator is integer-only, so identical seeds
give bit-identical samples on every platform and Python version (no dependence
on `random`'s float paths or version-specific shuffles).

SplitMix64 reference: Steele, Lea & Flood, "Fast splittable pseudorandom
number generators" (the java.util.SplittableRandom finalizer).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def split(seed: int, *indices: int) -> int:
    """Derive a child seed from `seed` and one or more stream indices.

    Folding is left-to-right, so split(s, a, b) == split(split(s, a), b).
    """
    child = seed & _MASK64
    for i in indices:
        child = _mix((child + (_GOLDEN * (i + 1))) & _MASK64)
    return child


class Stream:
    """A single SplitMix64 stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random mantissa bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        # Reject draws from the incomplete top block of [0, 2^64).
        limit = _MASK64 - (_MASK64 % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.randrange(i + 1)
            xs[i], xs[j] = xs[j], xs[i]
