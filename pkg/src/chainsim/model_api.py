"""Plugin contract between the engine and a simulation model.

A model splits its work into tasks.  Creation (serialized by the engine)
produces a *recipe*: an immutable payload holding everything execution needs
beyond shared model state, including the task's child RNG seed.  Each worker
carries a *record*: a compact summary of the tasks it traversed without
executing this cycle, from which the model decides whether the task at hand
may run yet.

`depends` may over-approximate (flag a task that is in fact safe) but must
never under-approximate: every ordering the sequential run relies on has to
be flagged while the earlier task is still uncompleted.
"""

from __future__ import annotations

import abc
from typing import Optional


class Model(abc.ABC):
    """Behavioral contract a simulation model implements for the engine."""

    def prepare(self) -> None:
        """Work that belongs to the timed region but precedes the first task
        (e.g. derived data structures).  Default: nothing."""

    @abc.abstractmethod
    def create(self) -> Optional[object]:
        """Next recipe in the model's deterministic creation sequence, or
        None once the task budget is exhausted.  Called only under the
        engine's creation serialization; advances the creation cursor."""

    @abc.abstractmethod
    def execute(self, recipe) -> None:
        """Mutate shared state exactly as the sequential run would; all
        randomness comes from the recipe's child stream."""

    @abc.abstractmethod
    def new_record(self):
        """Fresh, empty worker record."""

    @abc.abstractmethod
    def reset(self, record) -> None:
        """Restore a record to the freshly-constructed state (cycle start)."""

    @abc.abstractmethod
    def depends(self, record, recipe) -> bool:
        """True if executing `recipe` now could violate an ordering against a
        traversed, uncompleted task summarized in `record`."""

    @abc.abstractmethod
    def absorb(self, record, recipe) -> None:
        """Fold a skipped recipe into the record (idempotent, monotone)."""

    @abc.abstractmethod
    def state_digest(self) -> int:
        """Deterministic 64-bit digest over the full agent-state arrays."""
