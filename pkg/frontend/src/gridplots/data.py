"""CSV loading and per-panel statistics.

The input is the benchmark harness CSV: one row per checkpoint, one
run_id per repetition.  The grid figure uses only each run's final
checkpoint; curve mode keeps the whole checkpoint trajectory.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

REQUIRED_COLUMNS = (
    "run_id",
    "learner",
    "loss",
    "k",
    "d",
    "noise",
    "t",
    "error_rate",
)


class MissingColumnsError(ValueError):
    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__(
            "input CSV is missing required columns: " + ", ".join(missing)
        )


@dataclass(frozen=True)
class SeriesPoint:
    """Final error rate of one series inside one panel."""

    mean: float
    lo: float
    hi: float
    n_reps: int


def load_rows(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise MissingColumnsError(missing)
        return list(reader)


def final_rows(rows: list[dict]) -> list[dict]:
    """Keep only the largest-t checkpoint of each run."""
    best: dict[str, dict] = {}
    for row in rows:
        run_id = row["run_id"]
        if run_id not in best or int(row["t"]) > int(best[run_id]["t"]):
            best[run_id] = row
    return [best[k] for k in sorted(best)]


def _panel_key(row: dict) -> tuple[int, int]:
    return int(row["k"]), int(row["d"])


def _series_key(row: dict) -> tuple[str, str]:
    return row["learner"], row["loss"]


def grid_stats(rows: list[dict]) -> dict:
    """noise -> (k, d) -> (learner, loss) -> SeriesPoint over repetitions."""
    out: dict = {}
    for row in final_rows(rows):
        noise = float(row["noise"])
        panel = out.setdefault(noise, {}).setdefault(_panel_key(row), {})
        panel.setdefault(_series_key(row), []).append(float(row["error_rate"]))
    stats: dict = {}
    for noise in sorted(out):
        stats[noise] = {}
        for panel_key in sorted(out[noise]):
            stats[noise][panel_key] = {}
            for series_key in sorted(out[noise][panel_key]):
                values = out[noise][panel_key][series_key]
                stats[noise][panel_key][series_key] = SeriesPoint(
                    mean=sum(values) / len(values),
                    lo=min(values),
                    hi=max(values),
                    n_reps=len(values),
                )
    return stats


def curve_stats(rows: list[dict]) -> dict:
    """noise -> (k, d) -> (learner, loss) -> sorted list of
    (t, mean error_rate over repetitions at that checkpoint)."""
    raw: dict = {}
    for row in rows:
        noise = float(row["noise"])
        panel = raw.setdefault(noise, {}).setdefault(_panel_key(row), {})
        series = panel.setdefault(_series_key(row), {})
        series.setdefault(int(row["t"]), []).append(float(row["error_rate"]))
    stats: dict = {}
    for noise in sorted(raw):
        stats[noise] = {}
        for panel_key in sorted(raw[noise]):
            stats[noise][panel_key] = {}
            for series_key in sorted(raw[noise][panel_key]):
                points = raw[noise][panel_key][series_key]
                stats[noise][panel_key][series_key] = [
                    (t, sum(points[t]) / len(points[t])) for t in sorted(points)
                ]
    return stats
