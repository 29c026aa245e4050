from .plot import SUMMARY_COLUMNS, FigureSpec, Series, plot_summary, read_summary

__all__ = ["SUMMARY_COLUMNS", "FigureSpec", "Series", "plot_summary",
           "read_summary"]
