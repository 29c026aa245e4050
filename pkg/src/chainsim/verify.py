"""Ground-truth machinery: sequential oracle and trace validation.

`run_sequential` executes every task immediately after creating it, which by
construction reproduces the plain simulation; the engine must match its
digest bit for bit.  `ground_truth_deps` derives the exact model-level
dependence pairs from a recipe log, and `validate_trace` proves that a run's
trace never started a dependent task before its predecessor finished.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rng
from .cultural import CulturalRecipe
from .engine import (KIND_CREATED, KIND_ERASED, KIND_EXEC_END, KIND_EXEC_START,
                     TraceEvent)
from .sir import SirRecipe, TaskPhase


@dataclass
class SequentialResult:
    digest: int
    recipes: List[object]


def run_sequential(model) -> SequentialResult:
    """Create and immediately execute each task in creation order."""
    model.prepare()
    recipes = []
    while True:
        recipe = model.create()
        if recipe is None:
            break
        model.execute(recipe)
        recipes.append(recipe)
    return SequentialResult(model.state_digest(), recipes)


@dataclass
class GroundTruthDeps:
    """Ordered dependence pairs (i, j), i < j, as parallel index arrays."""

    i: np.ndarray
    j: np.ndarray

    def __len__(self) -> int:
        return len(self.i)

    def as_set(self) -> set:
        return set(zip(self.i.tolist(), self.j.tolist()))


def _pairs_before(earlier: List[int], later: List[int]) -> Tuple[list, list]:
    """All (i, j) with i in `earlier`, j in `later`, i < j (lists sorted)."""
    if not earlier or not later:
        return [], []
    e = np.asarray(earlier)
    l = np.asarray(later)
    counts = np.searchsorted(e, l)
    i_parts = [e[:c] for c in counts if c]
    if not i_parts:
        return [], []
    return (
        np.concatenate(i_parts).tolist(),
        np.repeat(l, counts).tolist(),
    )


def _cultural_deps(recipes: Sequence[CulturalRecipe]) -> GroundTruthDeps:
    # i < j with recipes[i].target in {recipes[j].source, recipes[j].target}
    target_index: Dict[int, List[int]] = {}
    ii: List[int] = []
    jj: List[int] = []
    for j, r in enumerate(recipes):
        for agent in (r.source, r.target):
            for i in target_index.get(agent, ()):
                ii.append(i)
                jj.append(j)
        target_index.setdefault(r.target, []).append(j)
    return GroundTruthDeps(np.asarray(ii, dtype=np.int64), np.asarray(jj, dtype=np.int64))


def _sir_deps(recipes: Sequence[SirRecipe], aggregate_adj: np.ndarray) -> GroundTruthDeps:
    n_subsets = aggregate_adj.shape[0]
    computes: List[List[int]] = [[] for _ in range(n_subsets)]
    commits: List[List[int]] = [[] for _ in range(n_subsets)]
    for idx, r in enumerate(recipes):
        (computes if r.task_phase is TaskPhase.COMPUTE_NEW else commits)[r.subset].append(idx)
    ii: List[int] = []
    jj: List[int] = []
    for x in range(n_subsets):
        # ComputeNew(x) precedes Commit(x)
        a, b = _pairs_before(computes[x], commits[x])
        ii += a
        jj += b
        # Commit(y) precedes ComputeNew(x) for y adjacent (or equal) to x
        for y in range(n_subsets):
            if aggregate_adj[x, y]:
                a, b = _pairs_before(commits[y], computes[x])
                ii += a
                jj += b
    return GroundTruthDeps(np.asarray(ii, dtype=np.int64), np.asarray(jj, dtype=np.int64))


def ground_truth_deps(recipes: Sequence[object], model_kind: str,
                      aggregate_adj: Optional[np.ndarray] = None) -> GroundTruthDeps:
    if model_kind == "cultural":
        return _cultural_deps(recipes)
    if model_kind == "sir":
        if aggregate_adj is None:
            raise ValueError("SIR ground truth needs the aggregate adjacency")
        return _sir_deps(recipes, aggregate_adj)
    raise ValueError(f"unknown model kind: {model_kind!r}")


@dataclass
class ValidationReport:
    order_violations: List[Tuple[int, int]] = field(default_factory=list)
    lifecycle_violations: List[str] = field(default_factory=list)
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def violations(self) -> List:
        return list(self.order_violations) + list(self.lifecycle_violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_text(self) -> str:
        lines = [f"{k}={v}" for k, v in sorted(self.counts.items())]
        lines.append(f"order_violations={len(self.order_violations)}")
        lines.append(f"lifecycle_violations={len(self.lifecycle_violations)}")
        for i, j in self.order_violations[:100]:
            lines.append(f"order violation: ExecEnd({i}) after ExecStart({j})")
        lines.extend(self.lifecycle_violations[:100])
        return "\n".join(lines)


_LIFECYCLE_ORDER = (KIND_CREATED, KIND_EXEC_START, KIND_EXEC_END, KIND_ERASED)


def validate_trace(events: Sequence[TraceEvent], deps: GroundTruthDeps) -> ValidationReport:
    """Check lifecycle invariants and that every dependence pair was ordered."""
    report = ValidationReport()
    n_tasks = 1 + max((ev.task_id for ev in events), default=-1)
    seqs = np.full((len(_LIFECYCLE_ORDER), n_tasks), -1, dtype=np.int64)
    kind_pos = {k: p for p, k in enumerate(_LIFECYCLE_ORDER)}
    counts: Dict[str, int] = {}
    for ev in events:
        counts[ev.kind] = counts.get(ev.kind, 0) + 1
        pos = kind_pos.get(ev.kind)
        if pos is None:
            continue  # skip events carry no lifecycle constraint
        if seqs[pos, ev.task_id] != -1:
            report.lifecycle_violations.append(
                f"task {ev.task_id}: duplicate {ev.kind}")
        else:
            seqs[pos, ev.task_id] = ev.seq
    report.counts = counts
    for task_id in range(n_tasks):
        col = seqs[:, task_id]
        if col[0] == -1:
            report.lifecycle_violations.append(f"task {task_id}: never created")
        # a later lifecycle stage present without the earlier one
        for later in range(3, 0, -1):
            if col[later] != -1 and col[later - 1] == -1:
                report.lifecycle_violations.append(
                    f"task {task_id}: {_LIFECYCLE_ORDER[later]} without "
                    f"{_LIFECYCLE_ORDER[later - 1]}")
        for a in range(3):
            if col[a] != -1 and col[a + 1] != -1 and col[a] > col[a + 1]:
                report.lifecycle_violations.append(
                    f"task {task_id}: {_LIFECYCLE_ORDER[a]} after "
                    f"{_LIFECYCLE_ORDER[a + 1]}")
    if len(deps):
        end = seqs[kind_pos[KIND_EXEC_END]]
        start = seqs[kind_pos[KIND_EXEC_START]]
        valid = (deps.i < n_tasks) & (deps.j < n_tasks)
        i_arr, j_arr = deps.i[valid], deps.j[valid]
        known = (end[i_arr] != -1) & (start[j_arr] != -1)
        bad = known & (end[i_arr] >= start[j_arr])
        report.order_violations = list(zip(i_arr[bad].tolist(), j_arr[bad].tolist()))
    return report


# -- independent single-task oracles (guard against shared bugs) -------------


def cultural_interaction_oracle(traits: np.ndarray, recipe: CulturalRecipe,
                                omega_gate: float) -> np.ndarray:
    """Recompute one interaction from scratch on a trait matrix copy."""
    out = np.array(traits, copy=True)
    src, tgt = out[recipe.source], out[recipe.target]
    features = out.shape[1]
    overlap = float(np.count_nonzero(src == tgt)) / features
    differing = np.flatnonzero(src != tgt)
    if overlap < omega_gate or differing.size == 0:
        return out
    stream = rng.Stream(recipe.child_seed)
    if stream.uniform() < overlap:
        f = differing[int(stream.uniform() * differing.size)]
        tgt[f] = src[f]
    return out


def sir_compute_oracle(current: np.ndarray, neighbors: np.ndarray,
                       recipe: SirRecipe, subset_size: int,
                       p_si: float, p_ir: float, p_rs: float) -> np.ndarray:
    """Recompute one ComputeNew subset per agent, in plain Python."""
    lo = recipe.subset * subset_size
    hi = lo + subset_size
    k = neighbors.shape[1]
    stream = rng.Stream(recipe.child_seed)
    out = np.empty(subset_size, dtype=np.uint8)
    for offset, a in enumerate(range(lo, hi)):
        u = stream.uniform()
        state = int(current[a])
        if state == 0:
            infected = sum(1 for nb in neighbors[a] if current[nb] == 1)
            out[offset] = 1 if u < p_si * infected / k else 0
        elif state == 1:
            out[offset] = 2 if u < p_ir else 1
        else:
            out[offset] = 0 if u < p_rs else 2
    return out


def brute_force_aggregate_adj(neighbors: np.ndarray, subset_size: int) -> np.ndarray:
    """Aggregate adjacency by scanning every edge pair, the slow way."""
    n_agents = neighbors.shape[0]
    n_subsets = n_agents // subset_size
    adj = np.zeros((n_subsets, n_subsets), dtype=bool)
    for a in range(n_agents):
        sa = a // subset_size
        adj[sa, sa] = True
        for b in neighbors[a]:
            sb = b // subset_size
            adj[sa, sb] = True
            adj[sb, sa] = True
    return adj
