"""Error-vs-time figures from evaluation CSVs.

Input layout is the run tree ``<root>/<config>/<seed>/eval/<scenario>.csv``;
``<scenario>_summary.csv`` files written next to them by ``auvdock eval`` are
skipped.
For every (config, scenario) the per-seed curve is the mean over episodes at
each step; the plotted line is the mean of those curves across seeds and the
band is +/- one standard deviation across seeds.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import csvio  # noqa: E402

METRICS = {"pos": ("pos_err_m", "positional error [m]"), "ang": ("ang_err_rad", "angular error [rad]")}
SCENARIO_ORDER = ("easy", "medium", "hard")
CONFIG_ORDER = ("naive", "small_dr", "large_dr", "large_dr_history")


@dataclass
class Curve:
    time_s: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_seeds: int


def read_eval_tree(root) -> dict:
    """{(config, seed, scenario): {"time": (T,), "pos": (E, T), "ang": (E, T)}}"""
    out = {}
    for path in sorted(Path(root).glob("*/*/eval/*.csv")):
        if path.stem.endswith("_summary"):
            continue
        config, seed = path.parts[-4], path.parts[-3]
        rows = csvio.read_csv(path, csvio.EVAL)
        csvio.check_nonnegative(path, rows, csvio.EVAL, ("time_s", "pos_err_m", "ang_err_rad"))
        out[(config, int(seed) if seed.isdigit() else seed, path.stem)] = _episode_arrays(rows)
    return out


def _episode_arrays(rows):
    episodes = sorted({r[0] for r in rows})
    steps = max((r[1] for r in rows), default=0)
    pos = np.full((len(episodes), steps), np.nan)
    ang = np.full((len(episodes), steps), np.nan)
    time = np.full(steps, np.nan)
    index = {e: i for i, e in enumerate(episodes)}
    for ep, step, t, p, a in rows:
        pos[index[ep], step - 1] = p
        ang[index[ep], step - 1] = a
        time[step - 1] = t
    return {"time": time, "pos": pos, "ang": ang}


def aggregate(tree: dict) -> dict:
    """{(config, scenario, metric): Curve}"""
    grouped: dict = {}
    for (config, _seed, scenario), arrays in tree.items():
        grouped.setdefault((config, scenario), []).append(arrays)
    curves = {}
    for (config, scenario), seeds in grouped.items():
        steps = min(a["pos"].shape[1] for a in seeds)
        time = seeds[0]["time"][:steps]
        for metric in METRICS:
            per_seed = np.stack([np.nanmean(a[metric][:, :steps], axis=0) for a in seeds])
            curves[(config, scenario, metric)] = Curve(time, per_seed.mean(axis=0), per_seed.std(axis=0), len(seeds))
    return curves


def _ordered(items, order):
    known = [x for x in order if x in items]
    return known + sorted(x for x in items if x not in order)


def plot_curves(curves: dict, out_dir) -> list[Path]:
    """One SVG per (metric, scenario) named ``<metric>_<scenario>.svg``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = _ordered({c for c, _, _ in curves}, CONFIG_ORDER)
    scenarios = _ordered({s for _, s, _ in curves}, SCENARIO_ORDER)
    written = []
    with plt.rc_context({"svg.hashsalt": "auvdock", "svg.fonttype": "path"}):
        for metric, (_, label) in METRICS.items():
            for scenario in scenarios:
                fig, ax = plt.subplots(figsize=(6.0, 3.6))
                for config in configs:
                    curve = curves.get((config, scenario, metric))
                    if curve is None:
                        continue
                    (line,) = ax.plot(curve.time_s, curve.mean, label=f"{config} (n={curve.n_seeds})")
                    ax.fill_between(
                        curve.time_s, curve.mean - curve.std, curve.mean + curve.std,
                        color=line.get_color(), alpha=0.2, linewidth=0,
                    )
                ax.set_xlabel("time [s]")
                ax.set_ylabel(label)
                ax.set_title(f"{label.split(' [')[0]} - {scenario} payload")
                ax.set_ylim(bottom=0)
                ax.grid(alpha=0.3)
                ax.legend(fontsize=8)
                fig.tight_layout()
                path = out_dir / f"{metric}_{scenario}.svg"
                fig.savefig(path, format="svg", metadata={"Date": None})
                plt.close(fig)
                written.append(path)
    return written


def plot(input_dir, out_dir) -> list[Path]:
    return plot_curves(aggregate(read_eval_tree(input_dir)), out_dir)
