"""SplitMix64 generator with a fully specified output mapping.

Output i (1-based) of a stream seeded with s is ``mix(s + i * GOLDEN)``
mod 2**64, so blocks of draws can be produced with vectorized uint64
arithmetic. Doubles take the top 53 bits; normals use Box-Muller on
consecutive uniform pairs. Nothing depends on numpy's own bit generators,
which keeps datasets and inits reproducible from the algorithm alone.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically combine a seed with integer keys (e.g. an epoch index)."""
    h = seed & MASK64
    for k in keys:
        h = int(_mix(np.array([(h + (k + 1) * GOLDEN) & MASK64], dtype=np.uint64))[0])
    return h


class SplitMix64:
    def __init__(self, seed: int = 0, counter: int = 0):
        self.seed = seed & MASK64
        self.counter = counter

    def next_u64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        # uint64 array arithmetic wraps mod 2**64
        states = np.uint64(self.seed) + idx * np.uint64(GOLDEN)
        return _mix(states)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles in [0, 1)."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def normal(self, n: int) -> np.ndarray:
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniform(n), kind="stable")

    def state(self) -> dict:
        return {"seed": self.seed, "counter": self.counter}

    @classmethod
    def from_state(cls, d: dict) -> "SplitMix64":
        return cls(d["seed"], d["counter"])
