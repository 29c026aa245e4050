import csv

import pytest
from matplotlib.figure import Figure

from chainfig import FigureSpec, plot_summary, read_summary
from chainfig.cli import main

HEADER = ["model", "s", "n", "mean_ms", "sem_ms", "runs"]


def write_summary(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)


def sample_rows(n_values=(1, 2, 3, 4, 5), s_values=(10, 50, 100)):
    rows = []
    for n in n_values:
        for i, s in enumerate(s_values):
            rows.append(["cultural", s, n, f"{10.0 * s / n + i:.3f}",
                         f"{0.5 + 0.1 * n:.3f}", 5])
    return rows


def test_read_summary_groups_by_worker_count(tmp_path):
    path = tmp_path / "summary.csv"
    write_summary(path, sample_rows())
    series = read_summary(str(path))
    assert [c.n for c in series] == [1, 2, 3, 4, 5]
    assert all(c.s == [10, 50, 100] for c in series)
    assert series[0].label == "n=1"


def test_series_match_csv_to_full_precision(tmp_path):
    path = tmp_path / "summary.csv"
    rows = sample_rows()
    write_summary(path, rows)
    series = {c.n: c for c in read_summary(str(path))}
    for model, s, n, mean_ms, sem_ms, runs in rows:
        curve = series[n]
        i = curve.s.index(s)
        assert curve.mean_ms[i] == float(mean_ms)
        assert curve.sem_ms[i] == float(sem_ms)


def test_plot_writes_image_with_one_curve_per_n(tmp_path):
    path = tmp_path / "summary.csv"
    out = tmp_path / "fig.png"
    write_summary(path, sample_rows())
    fig = plot_summary(FigureSpec(str(path), str(out)))
    assert isinstance(fig, Figure)
    assert out.stat().st_size > 0
    ax = fig.axes[0]
    handles, labels = ax.get_legend_handles_labels()
    assert labels == ["n=1", "n=2", "n=3", "n=4", "n=5"]
    # errorbar adds one container per curve, each carrying vertical bars
    assert len(ax.containers) == 5
    assert all(c.has_yerr for c in ax.containers)


def test_two_n_values_three_points_each(tmp_path):
    path = tmp_path / "summary.csv"
    out = tmp_path / "fig.png"
    write_summary(path, sample_rows(n_values=(1, 4)))
    fig = plot_summary(FigureSpec(str(path), str(out)))
    ax = fig.axes[0]
    assert len(ax.containers) == 2
    for container in ax.containers:
        assert len(container[0].get_xdata()) == 3


def test_zero_sem_rows_plot_without_error(tmp_path):
    path = tmp_path / "summary.csv"
    out = tmp_path / "fig.png"
    rows = [["sir", 10, 1, "5.000", "0.000", 1],
            ["sir", 20, 1, "3.000", "0.000", 1]]
    write_summary(path, rows)
    plot_summary(FigureSpec(str(path), str(out)))
    assert out.exists()


def test_replot_produces_identical_data_series(tmp_path):
    path = tmp_path / "summary.csv"
    write_summary(path, sample_rows())
    first = read_summary(str(path))
    second = read_summary(str(path))
    assert first == second


def test_missing_columns_fail_with_description(tmp_path):
    path = tmp_path / "summary.csv"
    path.write_text("model,s,n,mean_ms\ncultural,10,1,5.0\n")
    with pytest.raises(ValueError, match="expected columns"):
        read_summary(str(path))


def test_empty_summary_rejected(tmp_path):
    path = tmp_path / "summary.csv"
    write_summary(path, [])
    with pytest.raises(ValueError, match="no data rows"):
        read_summary(str(path))


def test_cli_plot_end_to_end(tmp_path):
    path = tmp_path / "summary.csv"
    out = tmp_path / "fig.svg"
    write_summary(path, sample_rows())
    rc = main(["plot", "--in", str(path), "--out", str(out),
               "--logy", "--title", "sweep"])
    assert rc == 0
    assert out.stat().st_size > 0
