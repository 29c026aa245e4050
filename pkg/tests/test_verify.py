import numpy as np
import pytest

from chainsim.cultural import CulturalModel, CulturalRecipe
from chainsim.engine import (EngineConfig, TraceEvent, read_trace_csv, run,
                             write_trace_csv)
from chainsim.sir import SirModel, SirRecipe, TaskPhase
from chainsim.verify import (GroundTruthDeps, ground_truth_deps,
                             run_sequential, validate_trace)


def cultural(seed=1, steps=400):
    return CulturalModel(20, 5, 3, steps, seed=seed)


def sir(seed=1, steps=6):
    return SirModel(40, 4, 0.8, 0.1, 0.3, steps=steps, subset_size=10, seed=seed)


# -- sequential oracle ---------------------------------------------------------


def test_oracle_self_consistency():
    a = run_sequential(cultural(seed=3))
    b = run_sequential(cultural(seed=3))
    assert a.digest == b.digest
    assert a.recipes == b.recipes


def test_zero_task_model_digest_is_initial_state():
    m = CulturalModel(20, 5, 3, 0, seed=2)
    initial = m.state_digest()
    result = run_sequential(m)
    assert result.digest == initial
    assert result.recipes == []


def test_recipe_log_matches_engine_creation_order():
    seq = run_sequential(cultural(seed=9))
    result = run(cultural(seed=9),
                 EngineConfig(n_workers=3, trace_enabled=True, watchdog_s=60))
    created = [ev.task_id for ev in result.trace if ev.kind == "Created"]
    assert created == list(range(len(seq.recipes)))
    # replaying creation on a fresh model yields the same recipes
    m = cultural(seed=9)
    assert [m.create() for _ in range(len(seq.recipes))] == seq.recipes


# -- ground truth -----------------------------------------------------------


def test_cultural_deps_disjoint_pairs_empty():
    recipes = [CulturalRecipe(1, 2, 0), CulturalRecipe(3, 4, 0)]
    assert ground_truth_deps(recipes, "cultural").as_set() == set()


def test_cultural_deps_prior_target_reused_as_source():
    recipes = [CulturalRecipe(1, 2, 0), CulturalRecipe(2, 5, 0)]
    assert ground_truth_deps(recipes, "cultural").as_set() == {(0, 1)}


def test_cultural_deps_prior_target_rewritten():
    recipes = [CulturalRecipe(1, 2, 0), CulturalRecipe(5, 2, 0),
               CulturalRecipe(2, 6, 0)]
    assert ground_truth_deps(recipes, "cultural").as_set() == {
        (0, 1), (0, 2), (1, 2)}


def test_sir_deps_compute_then_commit_same_subset():
    m = sir()
    m.prepare()
    recipes = [SirRecipe(2, TaskPhase.COMPUTE_NEW, 0),
               SirRecipe(2, TaskPhase.COMMIT, 0)]
    deps = ground_truth_deps(recipes, "sir", m.partition.aggregate_adj)
    assert (0, 1) in deps.as_set()


def test_sir_deps_commit_then_adjacent_compute():
    m = sir()
    m.prepare()
    recipes = [SirRecipe(3, TaskPhase.COMMIT, 0),
               SirRecipe(0, TaskPhase.COMPUTE_NEW, 0)]  # 3 and 0 touch (ring)
    deps = ground_truth_deps(recipes, "sir", m.partition.aggregate_adj)
    assert (0, 1) in deps.as_set()


def test_sir_deps_far_subsets_unrelated():
    m = SirModel(80, 4, 0.8, 0.1, 0.3, steps=2, subset_size=10, seed=1)
    m.prepare()
    recipes = [SirRecipe(1, TaskPhase.COMMIT, 0),
               SirRecipe(5, TaskPhase.COMPUTE_NEW, 0)]
    assert ground_truth_deps(recipes, "sir", m.partition.aggregate_adj).as_set() == set()


def test_unknown_model_kind_rejected():
    with pytest.raises(ValueError):
        ground_truth_deps([], "voter")
    with pytest.raises(ValueError):
        ground_truth_deps([], "sir")  # adjacency missing


# -- trace validation -----------------------------------------------------------


def _sequential_trace(n_tasks):
    events = []

    def emit(worker, task, kind):
        events.append(TraceEvent(len(events), worker, task, kind))

    for i in range(n_tasks):
        emit(0, i, "Created")
        emit(0, i, "ExecStart")
        emit(0, i, "ExecEnd")
        emit(0, i, "Erased")
    return events


def test_sequential_run_trace_has_no_violations():
    result = run(cultural(seed=4), EngineConfig(n_workers=1, trace_enabled=True))
    seq = run_sequential(cultural(seed=4))
    deps = ground_truth_deps(seq.recipes, "cultural")
    report = validate_trace(result.trace, deps)
    assert report.ok, report.as_text()


def test_parallel_runs_have_no_violations_across_models_and_seeds():
    for seed in range(1, 6):
        seq = run_sequential(cultural(seed=seed, steps=200))
        deps = ground_truth_deps(seq.recipes, "cultural")
        result = run(cultural(seed=seed, steps=200),
                     EngineConfig(n_workers=5, trace_enabled=True, watchdog_s=60))
        assert validate_trace(result.trace, deps).ok
    for seed in range(1, 6):
        oracle_model = sir(seed=seed)
        seq = run_sequential(oracle_model)
        deps = ground_truth_deps(seq.recipes, "sir",
                                 oracle_model.partition.aggregate_adj)
        result = run(sir(seed=seed),
                     EngineConfig(n_workers=5, trace_enabled=True, watchdog_s=60))
        assert validate_trace(result.trace, deps).ok


def test_forged_swapped_pair_is_reported():
    events = _sequential_trace(4)
    deps = GroundTruthDeps(np.array([1]), np.array([2]))
    # swap ExecStart(2) before ExecEnd(1)
    by_key = {(ev.task_id, ev.kind): ev.seq for ev in events}
    forged = []
    for ev in events:
        if ev.task_id == 1 and ev.kind == "ExecEnd":
            forged.append(TraceEvent(by_key[(2, "ExecStart")], 0, 1, "ExecEnd"))
        elif ev.task_id == 2 and ev.kind == "ExecStart":
            forged.append(TraceEvent(by_key[(1, "ExecEnd")], 0, 2, "ExecStart"))
        else:
            forged.append(ev)
    report = validate_trace(forged, deps)
    assert report.order_violations == [(1, 2)]


def test_lifecycle_duplicate_and_missing_events_flagged():
    events = _sequential_trace(2)
    events.append(TraceEvent(len(events), 0, 1, "ExecStart"))
    report = validate_trace(events, GroundTruthDeps(np.array([]), np.array([])))
    assert any("duplicate" in v for v in report.lifecycle_violations)

    gap = [ev for ev in _sequential_trace(2) if not (ev.task_id == 1 and ev.kind == "Created")]
    report = validate_trace(gap, GroundTruthDeps(np.array([]), np.array([])))
    assert any("never created" in v or "without" in v
               for v in report.lifecycle_violations)


def test_injected_reorderings_each_detected():
    # validator soundness: any dependent pair flipped in the trace is found
    n_pairs = 12
    events = _sequential_trace(2 * n_pairs)
    deps = GroundTruthDeps(np.arange(0, 2 * n_pairs, 2),
                           np.arange(1, 2 * n_pairs, 2))
    flipped = set(range(0, 2 * n_pairs, 2))
    forged = []
    for m in range(n_pairs):
        i, j = 2 * m, 2 * m + 1
        base = len(forged)
        forged.append(TraceEvent(base + 0, 0, i, "Created"))
        forged.append(TraceEvent(base + 1, 0, j, "Created"))
        forged.append(TraceEvent(base + 2, 0, j, "ExecStart"))
        forged.append(TraceEvent(base + 3, 0, j, "ExecEnd"))
        forged.append(TraceEvent(base + 4, 0, j, "Erased"))
        forged.append(TraceEvent(base + 5, 0, i, "ExecStart"))
        forged.append(TraceEvent(base + 6, 0, i, "ExecEnd"))
        forged.append(TraceEvent(base + 7, 0, i, "Erased"))
    report = validate_trace(forged, deps)
    assert len(report.order_violations) == n_pairs
    assert set(report.order_violations) == {(2 * m, 2 * m + 1) for m in range(n_pairs)}
    assert not report.lifecycle_violations


# -- trace file round trip -------------------------------------------------------


def test_trace_csv_round_trip(tmp_path):
    result = run(cultural(seed=2, steps=50),
                 EngineConfig(n_workers=2, trace_enabled=True, watchdog_s=60))
    path = tmp_path / "trace.csv"
    write_trace_csv(result.trace, path)
    assert read_trace_csv(path) == result.trace
    first = path.read_text().splitlines()[0].split(",")
    assert len(first) == 4
    assert first[3] in {"Created", "ExecStart", "ExecEnd", "Erased",
                        "SkipDependent", "SkipBusy"}


def test_malformed_trace_line_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0,0,Created\nnot a record\n")
    with pytest.raises(ValueError, match="line 2"):
        read_trace_csv(path)
