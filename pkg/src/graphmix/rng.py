"""Deterministic random number generation.

xoshiro256** seeded through splitmix64, implemented with plain integer
arithmetic so the stream is bit-identical across platforms and across the
two execution paths in this package (the pure-Python reference steps and
the compiled kernels, which re-implement the same update; see _kernels).

Seed splitting: replica i of a run with master seed S uses
``split_seed(S, i)``, a splitmix64 finalizer applied to S + (i+1)*GOLDEN.
Distinct replicas therefore get decorrelated streams and any replica can
be regenerated in isolation.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def split_seed(master: int, index: int) -> int:
    """Derive the seed for replica `index` from a master seed."""
    if index < 0:
        raise InvalidInputError("replica index must be nonnegative")
    return _mix64((master + (index + 1) * GOLDEN) & _MASK)


def seed_state(seed: int) -> np.ndarray:
    """Expand a seed into a 4-word xoshiro256** state (uint64 array)."""
    out = np.empty(4, dtype=np.uint64)
    x = seed & _MASK
    for i in range(4):
        x = (x + GOLDEN) & _MASK
        out[i] = _mix64(x)
    return out


class Rng:
    """xoshiro256** stream with unbiased bounded draws.

    The state can be exported to / imported from the uint64 array format
    the kernels mutate in place, so a chain may alternate between the
    Python and compiled paths without perturbing the stream.
    """

    __slots__ = ("seed", "_s")

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        st = seed_state(self.seed)
        self._s = [int(w) for w in st]

    @classmethod
    def from_state(cls, state: np.ndarray) -> "Rng":
        r = cls.__new__(cls)
        r.seed = None
        r._s = [int(w) & _MASK for w in state]
        return r

    def state_array(self) -> np.ndarray:
        return np.array(self._s, dtype=np.uint64)

    def set_state(self, state: np.ndarray) -> None:
        self._s = [int(w) & _MASK for w in state]

    def u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (((s1 * 5) & _MASK) << 7 | ((s1 * 5) & _MASK) >> 57) & _MASK
        result = (result * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Rejection sampling, no modulo bias."""
        if n <= 0:
            raise InvalidInputError("bound must be positive")
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.u64()
            if r >= threshold:
                return r % n

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.u64() >> 11) * 2.0**-53

    def spawn(self, index: int) -> "Rng":
        if self.seed is None:
            raise InvalidInputError("cannot split a state-restored stream")
        return Rng(split_seed(self.seed, index))
