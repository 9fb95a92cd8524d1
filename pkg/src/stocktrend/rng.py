"""SplitMix64 random streams.

Every random decision in the package (bootstrap draws, per-node feature
subsets, SVM sample order, synthetic prices) comes from SplitMix64
(Steele, Lea & Flood, 2014), chosen because it is counter based: output ``i``
of a stream with state ``s`` is ``mix64(s + (i + 1) * GAMMA)``. That makes
streams trivially splittable and lets bootstrap draws be generated as one
vectorized numpy expression.

Conventions pinned here so independent implementations can match bit for bit:

* ``derive_state(*keys)`` folds integer keys into a stream state:
  ``s = 0; for k in keys: s = mix64((s ^ (k mod 2**64)) + GAMMA)``.
* A bounded draw in ``[0, n)`` uses the top 32 bits: ``((x >> 32) * n) >> 32``.
  ``n`` must be below ``2**32``.
* A uniform double in ``[0, 1)`` is ``(x >> 11) * 2**-53``.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_state(*keys: int) -> int:
    state = 0
    for key in keys:
        state = mix64((state ^ (key & MASK64)) + GAMMA)
    return state


def _mix64_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """A single SplitMix64 stream.

    The state is a plain Python int; ``advance`` and the vectorized helpers
    keep it consistent with drawing values one at a time.
    """

    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def from_keys(cls, *keys: int) -> "SplitMix64":
        return cls(derive_state(*keys))

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        if not 0 < n < (1 << 32):
            raise ValueError("bound must be in [1, 2**32)")
        return ((self.next_u64() >> 32) * n) >> 32

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def advance(self, count: int) -> None:
        self.state = (self.state + count * GAMMA) & MASK64

    def u64_array(self, size: int) -> np.ndarray:
        """Next ``size`` raw outputs as a uint64 array (advances the stream)."""
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            counters = np.uint64(self.state) + steps * np.uint64(GAMMA)
            out = _mix64_array(counters)
        self.advance(size)
        return out

    def integers(self, n: int, size: int) -> np.ndarray:
        """``size`` draws uniform on ``[0, n)`` as int64."""
        if not 0 < n < (1 << 32):
            raise ValueError("bound must be in [1, 2**32)")
        raw = self.u64_array(size)
        with np.errstate(over="ignore"):
            return (((raw >> np.uint64(32)) * np.uint64(n)) >> np.uint64(32)).astype(np.int64)

    def uniform(self, size: int) -> np.ndarray:
        raw = self.u64_array(size)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def normal(self, size: int) -> np.ndarray:
        """Standard normals by Box-Muller, consuming ``2 * size`` outputs."""
        u = self.uniform(2 * size)
        u1 = 1.0 - u[:size]  # (0, 1]
        u2 = u[size:]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def sample_without_replacement(self, pool: int, k: int) -> list:
        """Partial Fisher-Yates: the first ``k`` entries of a shuffled ``range(pool)``."""
        items = list(range(pool))
        for i in range(k):
            j = i + self.randbelow(pool - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def permutation(self, n: int) -> np.ndarray:
        return np.asarray(self.sample_without_replacement(n, n), dtype=np.int64)
