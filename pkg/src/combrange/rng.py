"""Deterministic random source: xoshiro256** behind a 64-bit bit buffer.

This is the pure-Python twin of the generator inside the numba kernels
(`_kernels.py`); the two must stay bit-for-bit identical, which the test
suite enforces.  The bit buffer hands out 2 bits for a degree-4 choice and
1 bit for a degree-2 choice; when fewer bits remain than requested, the
buffer is refilled whole and the leftover bits are discarded.  That refill
policy is part of the reproducibility contract.

Seeding: the 64-bit seed is expanded into the 256-bit xoshiro state with
four splitmix64 draws (the standard recipe).  Mixing of (master seed,
replicate index) into per-replicate seeds lives in `estimator.replicate_seed`.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer (Stafford mix 13); a bijection on 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class RandomSource:
    """Owns one xoshiro256** stream plus the bit buffer."""

    __slots__ = ("s0", "s1", "s2", "s3", "buf", "nbits")

    def __init__(self, seed: int):
        z = seed & _MASK64
        state = []
        for _ in range(4):
            z = (z + GOLDEN) & _MASK64
            state.append(mix64(z))
        if not any(state):
            state[0] = GOLDEN  # the all-zero xoshiro state is invalid
        self.s0, self.s1, self.s2, self.s3 = state
        self.buf = 0
        self.nbits = 0

    def next64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        out = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return out

    def bits(self, k: int) -> int:
        """Next ``k`` random bits (low bits first out of the buffer)."""
        if self.nbits < k:
            self.buf = self.next64()
            self.nbits = 64
        v = self.buf & ((1 << k) - 1)
        self.buf >>= k
        self.nbits -= k
        return v

    @property
    def state(self) -> tuple[int, int, int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3, self.buf, self.nbits)

    @state.setter
    def state(self, value: tuple[int, int, int, int, int, int]) -> None:
        self.s0, self.s1, self.s2, self.s3, self.buf, self.nbits = value
