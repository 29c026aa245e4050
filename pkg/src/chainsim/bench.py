"""Benchmark harness: sweep runner, summary statistics, command line.

One sweep cell is (task-size proxy s, worker count n, seed); cells run
strictly one at a time so timings are uncontended.  For the cultural model s
is the feature count F; for the SIR model s is the agent subset size.  The
n=1 run of each (s, seed) group goes first and arms the watchdog for the
multi-worker runs of the same cell.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .cultural import CulturalModel
from .engine import EngineConfig, WatchdogTimeout, run, write_trace_csv
from .sir import SirModel
from .verify import ground_truth_deps, run_sequential, validate_trace

RESULT_HEADER = ["model", "s", "n", "seed", "steps", "wall_ms", "digest"]
SUMMARY_HEADER = ["model", "s", "n", "mean_ms", "sem_ms", "runs"]

WATCHDOG_FACTOR = 20.0
WATCHDOG_FLOOR_S = 10.0

CULTURAL_DEFAULTS = {"agents": 10_000, "traits": 3, "omega_gate": 0.0,
                     "steps": 2_000_000}
SIR_DEFAULTS = {"agents": 4_000, "degree": 14, "p_si": 0.8, "p_ir": 0.1,
                "p_rs": 0.3, "steps": 3_000}


@dataclass
class SweepSpec:
    model_kind: str                      # "cultural" | "sir"
    s_values: List[int]                  # cultural: F; sir: subset size
    n_values: List[int]
    seeds: int = 5
    base_seed: int = 1
    cycle_cap: int = 6
    steps: Optional[int] = None
    params: Dict[str, float] = field(default_factory=dict)
    out_path: Optional[str] = None
    trace_path: Optional[str] = None
    validate: bool = False

    def __post_init__(self):
        if self.model_kind not in ("cultural", "sir"):
            raise ValueError(f"unknown model: {self.model_kind!r}")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if not self.s_values or not self.n_values:
            raise ValueError("sweep and worker lists must be non-empty")
        if any(n < 1 for n in self.n_values):
            raise ValueError("worker counts must be >= 1")
        merged = dict(CULTURAL_DEFAULTS if self.model_kind == "cultural"
                      else SIR_DEFAULTS)
        merged.update(self.params)
        if self.steps is not None:
            merged["steps"] = self.steps
        self.params = merged
        if self.model_kind == "sir":
            bad = [s for s in self.s_values
                   if int(merged["agents"]) % s != 0]
            if bad:
                raise ValueError(f"subset sizes {bad} do not divide "
                                 f"N={int(merged['agents'])}")


@dataclass
class ResultRow:
    model: str
    s: int
    n: int
    seed: int
    steps: int
    wall_ms: float
    digest: int

    def as_csv(self) -> List[str]:
        return [self.model, str(self.s), str(self.n), str(self.seed),
                str(self.steps), f"{self.wall_ms:.3f}", f"{self.digest:016x}"]


def build_model(spec: SweepSpec, s: int, seed: int):
    p = spec.params
    if spec.model_kind == "cultural":
        return CulturalModel(n_agents=int(p["agents"]), features=s,
                             traits_per_feature=int(p["traits"]),
                             steps=int(p["steps"]), seed=seed,
                             omega_gate=float(p["omega_gate"]))
    return SirModel(n_agents=int(p["agents"]), degree=int(p["degree"]),
                    p_si=float(p["p_si"]), p_ir=float(p["p_ir"]),
                    p_rs=float(p["p_rs"]), steps=int(p["steps"]),
                    subset_size=s, seed=seed)


def _validate_run(spec: SweepSpec, s: int, seed: int, trace) -> None:
    oracle = run_sequential(build_model(spec, s, seed))
    model = build_model(spec, s, seed)
    adj = None
    if spec.model_kind == "sir":
        model.prepare()
        adj = model.partition.aggregate_adj
    deps = ground_truth_deps(oracle.recipes, spec.model_kind, adj)
    report = validate_trace(trace, deps)
    if not report.ok:
        raise RuntimeError(
            f"trace validation failed for s={s} seed={seed}:\n{report.as_text()}")


def run_sweep(spec: SweepSpec, writer=None, echo=None) -> List[ResultRow]:
    """Run every (s, seed, n) cell; rows are emitted as they finish."""
    cores = os.cpu_count() or 1
    if max(spec.n_values) > cores:
        warnings.warn(
            f"sweep asks for up to {max(spec.n_values)} workers on a "
            f"{cores}-core machine; timings will not show real speedup",
            stacklevel=2)
    n_order = sorted(spec.n_values, key=lambda n: (n != 1, n))
    rows: List[ResultRow] = []
    steps = int(spec.params["steps"])
    for s in spec.s_values:
        for seed_off in range(spec.seeds):
            seed = spec.base_seed + seed_off
            baseline_s: Optional[float] = None
            for n in n_order:
                watchdog = None
                if baseline_s is not None:
                    watchdog = max(WATCHDOG_FACTOR * baseline_s, WATCHDOG_FLOOR_S)
                config = EngineConfig(n_workers=n, cycle_cap_C=spec.cycle_cap,
                                      master_seed=seed,
                                      trace_enabled=spec.trace_path is not None
                                      or spec.validate,
                                      watchdog_s=watchdog)
                model = build_model(spec, s, seed)
                try:
                    result = run(model, config)
                except WatchdogTimeout:
                    row = ResultRow(spec.model_kind, s, n, seed, steps, -1.0, 0)
                else:
                    row = ResultRow(spec.model_kind, s, n, seed, steps,
                                    result.wall_s * 1e3, result.digest)
                    if n == 1 and baseline_s is None:
                        baseline_s = result.wall_s
                    if result.trace is not None:
                        if spec.trace_path:
                            write_trace_csv(
                                result.trace,
                                _trace_file(spec.trace_path, s, n, seed))
                        if spec.validate:
                            _validate_run(spec, s, seed, result.trace)
                rows.append(row)
                if writer is not None:
                    writer.writerow(row.as_csv())
                if echo is not None:
                    echo(row)
    return rows


def _trace_file(base: str, s: int, n: int, seed: int) -> str:
    root, ext = os.path.splitext(base)
    return f"{root}.s{s}.n{n}.seed{seed}{ext or '.csv'}"


@dataclass
class SummaryRow:
    model: str
    s: int
    n: int
    mean_ms: float
    sem_ms: float
    runs: int

    def as_csv(self) -> List[str]:
        return [self.model, str(self.s), str(self.n),
                f"{self.mean_ms:.3f}", f"{self.sem_ms:.3f}", str(self.runs)]


def summarize(rows: Sequence[ResultRow]) -> List[SummaryRow]:
    """Per-(model, s, n) mean wall time and standard error of the mean."""
    cells: Dict[tuple, List[float]] = {}
    order: List[tuple] = []
    for row in rows:
        key = (row.model, row.s, row.n)
        if key not in cells:
            cells[key] = []
            order.append(key)
        if row.wall_ms >= 0:
            cells[key].append(row.wall_ms)
    out = []
    for key in order:
        values = cells[key]
        if not values:
            raise ValueError(f"no successful runs for cell {key}")
        mean = sum(values) / len(values)
        if len(values) > 1:
            var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
            sem = math.sqrt(var / len(values))
        else:
            sem = 0.0
        out.append(SummaryRow(key[0], key[1], key[2], mean, sem, len(values)))
    return out


def read_results_csv(path: str) -> List[ResultRow]:
    rows = []
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RESULT_HEADER:
            raise ValueError(f"unexpected results header: {header}")
        for rec in reader:
            rows.append(ResultRow(rec[0], int(rec[1]), int(rec[2]), int(rec[3]),
                                  int(rec[4]), float(rec[5]), int(rec[6], 16)))
    return rows


def write_summary_csv(summary: Sequence[SummaryRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for row in summary:
            writer.writerow(row.as_csv())


# -- command line -------------------------------------------------------------


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainsim",
        description="Adaptive parallel simulation benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a timing sweep")
    p_run.add_argument("--model", choices=["cultural", "sir"], required=True)
    p_run.add_argument("--workers", type=_int_list, default=[1, 2, 3, 4, 5],
                       help="comma list of worker counts")
    p_run.add_argument("--cycle-cap", type=int, default=6)
    p_run.add_argument("--seeds", type=int, default=5)
    p_run.add_argument("--base-seed", type=int, default=1)
    p_run.add_argument("--sweep", type=_int_list, required=True,
                       help="comma list of s values (cultural: F, sir: subset size)")
    p_run.add_argument("--steps", type=int, default=None)
    p_run.add_argument("--agents", type=int, default=None)
    p_run.add_argument("--traits", type=int, default=None, help="cultural q")
    p_run.add_argument("--omega-gate", type=float, default=None)
    p_run.add_argument("--degree", type=int, default=None, help="sir ring degree k")
    p_run.add_argument("--p-si", type=float, default=None)
    p_run.add_argument("--p-ir", type=float, default=None)
    p_run.add_argument("--p-rs", type=float, default=None)
    p_run.add_argument("--out", default="results.csv")
    p_run.add_argument("--trace", default=None, help="trace CSV path stem")
    p_run.add_argument("--validate", action="store_true",
                       help="validate each traced run against ground truth")

    p_sum = sub.add_parser("summarize", help="aggregate a results CSV")
    p_sum.add_argument("--in", dest="in_path", required=True)
    p_sum.add_argument("--out", dest="out_path", required=True)
    return parser


def _spec_from_args(args) -> SweepSpec:
    params = {}
    for key in ("agents", "traits", "omega_gate", "degree",
                "p_si", "p_ir", "p_rs"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    return SweepSpec(model_kind=args.model, s_values=args.sweep,
                     n_values=args.workers, seeds=args.seeds,
                     base_seed=args.base_seed, cycle_cap=args.cycle_cap,
                     steps=args.steps, params=params, out_path=args.out,
                     trace_path=args.trace, validate=args.validate)


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        spec = _spec_from_args(args)
        with open(spec.out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RESULT_HEADER)
            def echo(row: ResultRow) -> None:
                print(",".join(row.as_csv()), flush=True)
                fh.flush()
            run_sweep(spec, writer=writer, echo=echo)
        return 0
    rows = read_results_csv(args.in_path)
    write_summary_csv(summarize(rows), args.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
