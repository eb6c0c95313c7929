"""Matplotlib rendering of the figure grids."""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


@dataclass(frozen=True)
class FigureInfo:
    noise: float
    path: str
    n_panels: int
    n_series: int


def _series_label(series_key: tuple[str, str]) -> str:
    learner, loss = series_key
    return f"{learner}/{loss}"


def _noise_tag(noise: float) -> str:
    return f"{noise:g}".replace(".", "p")


def render_grid(stats: dict, out_dir: str) -> list[FigureInfo]:
    """One image per noise level; panels are the (K, d) grid; each series
    is a mean point with whiskers spanning min..max over repetitions."""
    os.makedirs(out_dir, exist_ok=True)
    infos = []
    for noise in sorted(stats):
        panels = stats[noise]
        ks = sorted({k for k, _ in panels})
        ds = sorted({d for _, d in panels})
        fig, axes = plt.subplots(
            len(ks), len(ds),
            figsize=(3.2 * len(ds), 2.6 * len(ks)),
            squeeze=False,
        )
        series_keys = sorted({s for panel in panels.values() for s in panel})
        for i, k in enumerate(ks):
            for j, d in enumerate(ds):
                ax = axes[i][j]
                panel = panels.get((k, d), {})
                xs, means, lower, upper, labels = [], [], [], [], []
                for pos, series_key in enumerate(series_keys):
                    point = panel.get(series_key)
                    if point is None:
                        continue
                    xs.append(pos)
                    means.append(point.mean)
                    lower.append(point.mean - point.lo)
                    upper.append(point.hi - point.mean)
                    labels.append(_series_label(series_key))
                ax.errorbar(xs, means, yerr=[lower, upper], fmt="o", capsize=3)
                ax.set_xticks(xs)
                ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=6)
                ax.set_title(f"K={k}, d={d}", fontsize=8)
                ax.set_ylabel("error rate", fontsize=7)
                ax.tick_params(labelsize=6)
        fig.suptitle(f"final error rate, noise={noise:g}", fontsize=10)
        fig.tight_layout()
        path = os.path.join(out_dir, f"grid_noise{_noise_tag(noise)}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        infos.append(
            FigureInfo(noise, path, n_panels=len(ks) * len(ds), n_series=len(series_keys))
        )
    return infos


def render_curves(stats: dict, out_dir: str) -> list[FigureInfo]:
    """Error rate against round count, one line per series per panel."""
    os.makedirs(out_dir, exist_ok=True)
    infos = []
    for noise in sorted(stats):
        panels = stats[noise]
        ks = sorted({k for k, _ in panels})
        ds = sorted({d for _, d in panels})
        fig, axes = plt.subplots(
            len(ks), len(ds),
            figsize=(3.6 * len(ds), 2.8 * len(ks)),
            squeeze=False,
        )
        series_keys = sorted({s for panel in panels.values() for s in panel})
        for i, k in enumerate(ks):
            for j, d in enumerate(ds):
                ax = axes[i][j]
                panel = panels.get((k, d), {})
                for series_key in series_keys:
                    points = panel.get(series_key)
                    if not points:
                        continue
                    ts = [t for t, _ in points]
                    errs = [e for _, e in points]
                    ax.plot(ts, errs, label=_series_label(series_key), linewidth=1)
                ax.set_xscale("log")
                ax.set_title(f"K={k}, d={d}", fontsize=8)
                ax.set_xlabel("rounds", fontsize=7)
                ax.set_ylabel("error rate", fontsize=7)
                ax.tick_params(labelsize=6)
        handles, labels = axes[0][0].get_legend_handles_labels()
        if handles:
            fig.legend(handles, labels, loc="lower center", ncol=3, fontsize=6)
        fig.suptitle(f"error rate vs rounds, noise={noise:g}", fontsize=10)
        fig.tight_layout(rect=(0, 0.08, 1, 1))
        path = os.path.join(out_dir, f"curves_noise{_noise_tag(noise)}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        infos.append(
            FigureInfo(noise, path, n_panels=len(ks) * len(ds), n_series=len(series_keys))
        )
    return infos
