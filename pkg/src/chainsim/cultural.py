"""Axelrod-type cultural dynamics on a complete graph.

Each of N agents holds F integer traits in [0, q).  One task is one pairwise
interaction: creation draws a (source, target) pair from the master stream,
execution computes the trait overlap of the pair and, when the bounded-
confidence gate allows and the agents are not identical, copies one differing
trait from source to target with probability equal to the overlap.

Dependence bookkeeping: only target rows are written, but source rows are
read, so a task must wait both when it touches a row a traversed task will
write (its target) and when it would overwrite a row a traversed task still
has to read (its source).  The record therefore keeps the targets *and*
sources of traversed tasks.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Set

import numpy as np

from . import rng
from .model_api import Model

_INIT_TAG = 0x494E4954  # "INIT"
_PAIR_TAG = 0x50414952  # "PAIR"


@dataclass(frozen=True)
class CulturalRecipe:
    source: int
    target: int
    child_seed: int


class CulturalRecord:
    __slots__ = ("targets_seen", "sources_seen")

    def __init__(self):
        self.targets_seen: Set[int] = set()
        self.sources_seen: Set[int] = set()

    def reset(self):
        self.targets_seen.clear()
        self.sources_seen.clear()


class CulturalModel(Model):
    def __init__(self, n_agents: int, features: int, traits_per_feature: int,
                 steps: int, seed: int, omega_gate: float = 0.0):
        if n_agents < 2:
            raise ValueError("need at least two agents")
        if not 0.0 <= omega_gate <= 1.0:
            raise ValueError("omega_gate must be in [0, 1]")
        self.n_agents = n_agents
        self.features = features
        self.q = traits_per_feature
        self.steps = steps
        self.seed = seed
        self.omega_gate = omega_gate
        self.cursor = 0
        uniforms = rng.uniform_array(rng.derive_stream_seed(seed, _INIT_TAG),
                                     n_agents * features)
        flat = (uniforms * traits_per_feature).astype(np.int64)
        # list-of-lists: row writes stay local and per-feature access is cheap
        self.traits = [flat[i * features:(i + 1) * features].tolist()
                       for i in range(n_agents)]
        self._pair_stream = rng.Stream(rng.derive_stream_seed(seed, _PAIR_TAG))

    @property
    def exhausted(self) -> bool:
        return self.cursor >= self.steps

    # -- creation --------------------------------------------------------

    def create(self) -> Optional[CulturalRecipe]:
        if self.cursor >= self.steps:
            return None
        stream = self._pair_stream
        source = stream.below(self.n_agents)
        target = stream.below(self.n_agents - 1)
        if target >= source:  # shift sampling keeps source != target
            target += 1
        recipe = CulturalRecipe(source, target, rng.child_seed(self.seed, self.cursor))
        self.cursor += 1
        return recipe

    # -- execution -------------------------------------------------------

    def overlap(self, a: int, b: int) -> float:
        """Fraction of features on which agents a and b coincide."""
        row_a, row_b = self.traits[a], self.traits[b]
        same = sum(1 for x, y in zip(row_a, row_b) if x == y)
        return same / self.features

    def execute(self, recipe: CulturalRecipe) -> None:
        src = self.traits[recipe.source]
        tgt = self.traits[recipe.target]
        same = 0
        differing = []
        f = 0
        for x, y in zip(src, tgt):
            if x == y:
                same += 1
            else:
                differing.append(f)
            f += 1
        o = same / self.features
        if o < self.omega_gate or not differing:
            return
        stream = rng.Stream(recipe.child_seed)
        if stream.uniform() < o:  # social influence succeeds
            f = differing[int(stream.uniform() * len(differing))]
            tgt[f] = src[f]

    # -- records ----------------------------------------------------------

    def new_record(self) -> CulturalRecord:
        return CulturalRecord()

    def reset(self, record: CulturalRecord) -> None:
        record.reset()

    def depends(self, record: CulturalRecord, recipe: CulturalRecipe) -> bool:
        return (recipe.source in record.targets_seen
                or recipe.target in record.targets_seen
                or recipe.target in record.sources_seen)

    def absorb(self, record: CulturalRecord, recipe: CulturalRecipe) -> None:
        record.targets_seen.add(recipe.target)
        record.sources_seen.add(recipe.source)

    # -- state -------------------------------------------------------------

    def state_digest(self) -> int:
        raw = np.asarray(self.traits, dtype=np.int64).tobytes()
        return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "big")
