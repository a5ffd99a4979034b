"""Portable 64-bit PRNG used by every stochastic sampler in this package.

Sample artifacts must be byte-identical across runs, platforms, and
reimplementations in other languages, so the generator is fully specified
here instead of delegating to a library RNG.

Generator: xoshiro256** (Blackman & Vigna), seeded with splitmix64.

splitmix64 (state ``x``, 64-bit wrapping arithmetic)::

    x += 0x9E3779B97F4A7C15
    z = x
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output: z ^ (z >> 31)

Seeding: the xoshiro256** state words ``s0..s3`` are the first four
splitmix64 outputs produced from the user seed (reduced mod 2**64).

xoshiro256** step, with ``rotl(v, k) = (v << k) | (v >> (64 - k))``::

    output = rotl(s1 * 5, 7) * 9
    t  = s1 << 17
    s2 ^= s0;  s3 ^= s1;  s1 ^= s2;  s0 ^= s3
    s2 ^= t
    s3 = rotl(s3, 45)

``random()`` maps one output word to a float in [0, 1) as
``(word >> 11) * 2**-53``. ``next_bit()`` returns the top bit of one
output word (used for uniform spin draws).
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_INV_2_53 = 2.0**-53


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First ``count`` outputs of splitmix64 started from ``seed``."""
    x = seed & _MASK64
    out = []
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


class Xoshiro256StarStar:
    """Scalar xoshiro256** stream seeded via splitmix64."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        self._s0, self._s1, self._s2, self._s3 = splitmix64_stream(seed, 4)

    def next_u64(self) -> int:
        s1 = self._s1
        result = ((((s1 * 5) & _MASK64) << 7 | ((s1 * 5) & _MASK64) >> 57) & _MASK64) * 9 & _MASK64
        t = (s1 << 17) & _MASK64
        s2 = self._s2 ^ self._s0
        s3 = self._s3 ^ s1
        self._s1 = s1 ^ s2
        self._s0 = self._s0 ^ s3
        self._s2 = s2 ^ t
        self._s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_bit(self) -> int:
        """Top bit of the next output word (fair coin)."""
        return self.next_u64() >> 63


class VectorXoshiro256StarStar:
    """Lane-parallel xoshiro256**: lane ``i`` is exactly ``Xoshiro256StarStar(seeds[i])``.

    Used to advance many independent chains in lockstep; outputs per lane
    are bit-identical to the scalar generator with the same seed.
    """

    def __init__(self, seeds):
        states = [splitmix64_stream(int(s), 4) for s in seeds]
        arr = np.array(states, dtype=np.uint64).T
        self._s = [arr[i].copy() for i in range(4)]
        self.n_lanes = arr.shape[1]

    def next_u64(self) -> np.ndarray:
        s0, s1, s2, s3 = self._s
        with np.errstate(over="ignore"):
            r = s1 * np.uint64(5)
            result = ((r << np.uint64(7)) | (r >> np.uint64(57))) * np.uint64(9)
            t = s1 << np.uint64(17)
            s2 = s2 ^ s0
            s3 = s3 ^ s1
            s1 = s1 ^ s2
            s0 = s0 ^ s3
            s2 = s2 ^ t
            s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> np.ndarray:
        return (self.next_u64() >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def next_bit(self) -> np.ndarray:
        return (self.next_u64() >> np.uint64(63)).astype(np.int64)
