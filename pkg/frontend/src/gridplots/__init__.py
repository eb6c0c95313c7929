"""Figure grids from benchmark result CSVs: one image per noise level,
panels faceted by (number of classes, feature dimension), one series per
learner and loss pair, mean final error rate with min/max whiskers over
repetitions."""

from .data import MissingColumnsError, SeriesPoint, curve_stats, grid_stats, load_rows

__all__ = [
    "MissingColumnsError",
    "SeriesPoint",
    "curve_stats",
    "grid_stats",
    "load_rows",
]

__version__ = "0.1.0"
