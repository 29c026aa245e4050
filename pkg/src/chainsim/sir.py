"""SIR epidemic dynamics on a ring lattice, parallelized at subset level.

Agents sit on a ring where every node is linked to its k/2 nearest
neighbors on each side.  A simulated step is a synchronous update split into
two task waves over a fixed, contiguous, equal-size partition of the agents:
ComputeNew tasks write each subset's next states from the current array, then
Commit tasks copy next into current for their subset.

Dependence bookkeeping works on the aggregate graph (subset-level adjacency,
self-inclusive): a Commit must wait for any traversed ComputeNew of the same
or an adjacent subset (ComputeNew both reads current across the boundary and
writes the next slice the Commit copies), and a ComputeNew must wait for any
traversed Commit of the same or an adjacent subset (Commit rewrites current
states the ComputeNew reads).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Set

import numpy as np
from numba import njit

from . import rng
from .model_api import Model

S, I, R = 0, 1, 2

_INIT_TAG = 0x53495230  # "SIR0"

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(rng.GAMMA)
_INV_2_53 = 1.0 / float(1 << 53)


class TaskPhase(Enum):
    COMPUTE_NEW = "ComputeNew"
    COMMIT = "Commit"


@dataclass(frozen=True)
class SirRecipe:
    subset: int
    task_phase: TaskPhase
    child_seed: int


class SirRecord:
    __slots__ = ("compute_seen", "commit_seen")

    def __init__(self):
        self.compute_seen: Set[int] = set()
        self.commit_seen: Set[int] = set()

    def reset(self):
        self.compute_seen.clear()
        self.commit_seen.clear()


def build_ring(n_agents: int, degree: int) -> np.ndarray:
    """Neighbor table of the ring lattice: node i adjacent to i +- 1..k/2."""
    if degree % 2 != 0:
        raise ValueError("ring degree must be even")
    if degree >= n_agents:
        raise ValueError("ring degree must be smaller than the agent count")
    half = degree // 2
    offsets = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    return (np.arange(n_agents)[:, None] + offsets[None, :]) % n_agents


@dataclass
class Partition:
    subset_size: int
    n_subsets: int
    subset_of: np.ndarray
    aggregate_adj: np.ndarray  # boolean, self-inclusive


def partition_and_aggregate(neighbors: np.ndarray, subset_size: int) -> Partition:
    """Contiguous equal partition plus the subset-level aggregate adjacency."""
    n_agents = neighbors.shape[0]
    if n_agents % subset_size != 0:
        raise ValueError("subset size must divide the agent count")
    n_subsets = n_agents // subset_size
    subset_of = np.arange(n_agents) // subset_size
    adj = np.zeros((n_subsets, n_subsets), dtype=bool)
    np.fill_diagonal(adj, True)
    src = np.repeat(subset_of, neighbors.shape[1])
    dst = subset_of[neighbors.ravel()]
    adj[src, dst] = True
    adj |= adj.T
    return Partition(subset_size, n_subsets, subset_of, adj)


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(nogil=True, cache=True)
def _compute_subset(current, nxt, neighbors, lo, hi, p_si, p_ir, p_rs, seed):
    """New states for agents [lo, hi): one stream draw per agent, in id order."""
    k = neighbors.shape[1]
    state = np.uint64(seed)
    for a in range(lo, hi):
        state = state + _GAMMA
        u = float(_mix64(state) >> np.uint64(11)) * _INV_2_53
        cur = current[a]
        if cur == 0:  # susceptible
            infected = 0
            for j in range(k):
                if current[neighbors[a, j]] == 1:
                    infected += 1
            nxt[a] = 1 if u < p_si * infected / k else 0
        elif cur == 1:  # infected
            nxt[a] = 2 if u < p_ir else 1
        else:  # recovered
            nxt[a] = 0 if u < p_rs else 2


class SirModel(Model):
    def __init__(self, n_agents: int, degree: int, p_si: float, p_ir: float,
                 p_rs: float, steps: int, subset_size: int, seed: int,
                 initial_infected: float = 0.1):
        for name, p in (("p_si", p_si), ("p_ir", p_ir), ("p_rs", p_rs)):
            if not 0.0 < p < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        self.n_agents = n_agents
        self.degree = degree
        self.p_si = p_si
        self.p_ir = p_ir
        self.p_rs = p_rs
        self.steps = steps
        self.subset_size = subset_size
        self.seed = seed
        self.cursor = 0
        self.neighbors = build_ring(n_agents, degree)
        if n_agents % subset_size != 0:
            raise ValueError("subset size must divide the agent count")
        self.n_subsets = n_agents // subset_size
        self.budget = steps * 2 * self.n_subsets
        self.partition: Optional[Partition] = None  # built in prepare(): timed
        uniforms = rng.uniform_array(rng.derive_stream_seed(seed, _INIT_TAG),
                                     n_agents)
        self.current = np.where(uniforms < initial_infected, I, S).astype(np.uint8)
        self.next_state = self.current.copy()

    def prepare(self) -> None:
        # aggregate-graph construction counts towards the measured wall time
        self.partition = partition_and_aggregate(self.neighbors, self.subset_size)

    @property
    def exhausted(self) -> bool:
        return self.cursor >= self.budget

    # -- creation: per step, all ComputeNew waves then all Commit waves ----

    def create(self) -> Optional[SirRecipe]:
        if self.cursor >= self.budget:
            return None
        within = self.cursor % (2 * self.n_subsets)
        phase = TaskPhase.COMPUTE_NEW if within < self.n_subsets else TaskPhase.COMMIT
        recipe = SirRecipe(within % self.n_subsets, phase,
                           rng.child_seed(self.seed, self.cursor))
        self.cursor += 1
        return recipe

    # -- execution ---------------------------------------------------------

    def execute(self, recipe: SirRecipe) -> None:
        lo = recipe.subset * self.subset_size
        hi = lo + self.subset_size
        if recipe.task_phase is TaskPhase.COMPUTE_NEW:
            _compute_subset(self.current, self.next_state, self.neighbors,
                            lo, hi, self.p_si, self.p_ir, self.p_rs,
                            np.uint64(recipe.child_seed))
        else:
            self.current[lo:hi] = self.next_state[lo:hi]

    # -- records -------------------------------------------------------------

    def new_record(self) -> SirRecord:
        return SirRecord()

    def reset(self, record: SirRecord) -> None:
        record.reset()

    def depends(self, record: SirRecord, recipe: SirRecipe) -> bool:
        adj = self.partition.aggregate_adj
        x = recipe.subset
        if recipe.task_phase is TaskPhase.COMPUTE_NEW:
            return any(adj[x, y] for y in record.commit_seen)
        return any(adj[x, y] for y in record.compute_seen)

    def absorb(self, record: SirRecord, recipe: SirRecipe) -> None:
        if recipe.task_phase is TaskPhase.COMPUTE_NEW:
            record.compute_seen.add(recipe.subset)
        else:
            record.commit_seen.add(recipe.subset)

    # -- state -----------------------------------------------------------------

    def state_digest(self) -> int:
        raw = self.current.tobytes()
        return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "big")
