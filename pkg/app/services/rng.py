"""
Platform-independent 64-bit pseudo-random streams.

Streams are reproducible bit for bit in any language:

* seed expansion: SplitMix64 (increment 0x9E3779B97F4A7C15, finalizer
  multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31)
  fills the four state words of the generator;
* stream: xoshiro256** (output rotl(s1 * 5, 7) * 9, state shift 17,
  rotation 45);
* uniform doubles in [0, 1): the 53 high bits of each output times 2**-53.
"""
from typing import Iterable

import numpy as np

from app.errors import ConfigurationError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_DOUBLE_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers"""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    """Seed expander"""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)


class Xoshiro256StarStar:
    """xoshiro256** stream seeded through SplitMix64"""

    def __init__(self, seed: int):
        expander = SplitMix64(seed)
        self.s = [expander.next_u64() for _ in range(4)]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1)"""
        return (self.next_u64() >> 11) * _DOUBLE_UNIT

    def random_array(self, size: int) -> np.ndarray:
        """`size` consecutive uniforms as a float64 array"""
        next_u64 = self.next_u64
        return np.fromiter(
            ((next_u64() >> 11) * _DOUBLE_UNIT for _ in range(size)),
            dtype=np.float64,
            count=size,
        )


def trial_seed(master_seed: int, d: int, m: int, trial: int) -> int:
    """
    Seed of one (d, m, trial) cell of an experiment.

    The key packs d into 8 bits, m into 24 bits and trial into 32 bits; the
    result is mix64(mix64(master) XOR key), which is injective in the key for a
    fixed master seed.
    """
    if not (0 <= d < 1 << 8 and 0 <= m < 1 << 24 and 0 <= trial < 1 << 32):
        raise ConfigurationError(f"seed key out of range: d={d}, m={m}, trial={trial}")
    key = (d << 56) | (m << 32) | trial
    return mix64(mix64(master_seed) ^ key)


def substream_seed(master_seed: int, keys: Iterable[int]) -> int:
    """Seed for auxiliary streams keyed by arbitrary integers"""
    h = mix64(master_seed)
    for key in keys:
        h = mix64(h ^ mix64(key & MASK64))
    return h
