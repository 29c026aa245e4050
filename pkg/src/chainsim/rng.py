"""Counter-based random number streams.

Every task carries a child seed derived from (master seed, task id), so the
randomness consumed while executing a task is independent of the schedule
under which it runs.  The generator is a splitmix64 counter stream: cheap,
stateless to split, and easy to reproduce identically inside numba kernels.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """splitmix64 finalizer (Stafford mix13)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def child_seed(master_seed: int, task_id: int) -> int:
    """Derive the per-task seed from the master seed and the creation index."""
    return mix64((master_seed + GAMMA * (task_id + 1)) & MASK64)


def derive_stream_seed(master_seed: int, purpose: int) -> int:
    """Seed for an auxiliary stream (initial state, pair selection, ...)."""
    return mix64(mix64(master_seed & MASK64) ^ mix64(purpose & MASK64))


def uniform_array(seed: int, count: int):
    """The first `count` uniforms of Stream(seed), computed vectorized."""
    import numpy as np

    states = (np.uint64(seed & MASK64)
              + np.uint64(GAMMA) * np.arange(1, count + 1, dtype=np.uint64))
    z = states
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


class Stream:
    """Deterministic uniform stream over a splitmix64 counter."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)
