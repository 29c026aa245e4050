"""Plot a benchmark summary CSV as mean time curves with error bars.

The input is the aggregated CSV the benchmark CLI emits: one row per
(model, s, n) cell with columns `model,s,n,mean_ms,sem_ms,runs`.  Each worker
count n becomes one curve over the sweep values s, with the standard error of
the mean as vertical error bars.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SUMMARY_COLUMNS = ["model", "s", "n", "mean_ms", "sem_ms", "runs"]


@dataclass
class Series:
    """One curve: a worker count with its sweep points."""

    n: int
    s: List[int]
    mean_ms: List[float]
    sem_ms: List[float]

    @property
    def label(self) -> str:
        return f"n={self.n}"


@dataclass
class FigureSpec:
    in_path: str
    out_path: str
    xlabel: str = "task size s"
    ylabel: str = "mean simulation time [ms]"
    title: Optional[str] = None
    logx: bool = False
    logy: bool = False


def read_summary(path: str) -> List[Series]:
    """Parse a summary CSV into one Series per worker count.

    Rows stay in file order within each curve; the worker counts are sorted
    so legends always read n=1, n=2, ...
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SUMMARY_COLUMNS:
            raise ValueError(
                f"{path}: expected columns {SUMMARY_COLUMNS}, found {header}")
        cells: Dict[int, List[Tuple[int, float, float]]] = {}
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(SUMMARY_COLUMNS):
                raise ValueError(f"{path} line {lineno}: malformed row {rec!r}")
            n = int(rec[2])
            cells.setdefault(n, []).append(
                (int(rec[1]), float(rec[3]), float(rec[4])))
    if not cells:
        raise ValueError(f"{path}: no data rows")
    series = []
    for n in sorted(cells):
        points = cells[n]
        series.append(Series(n, [p[0] for p in points],
                             [p[1] for p in points], [p[2] for p in points]))
    return series


def plot_summary(spec: FigureSpec):
    """Render the summary to spec.out_path and return the figure."""
    series = read_summary(spec.in_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for curve in series:
        ax.errorbar(curve.s, curve.mean_ms, yerr=curve.sem_ms,
                    marker="o", capsize=3, label=curve.label)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path)
    return fig
