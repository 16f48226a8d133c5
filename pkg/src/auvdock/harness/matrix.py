"""Evaluation matrix: every (config, seed) checkpoint under every scenario."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio, plotting
from .config import PRESET_NAMES, SCENARIO_NAMES, get_scenario
from .evaluate import evaluate, write_eval
from .train import run_dir

log = logging.getLogger(__name__)


@dataclass
class MatrixReport:
    episodes: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    plots: list = field(default_factory=list)
    ordering: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.missing


def qualitative_ordering(episodes: list) -> dict:
    """Record (never enforce) the orderings reported for the hard payload and
    for angular error. Medians pool all seeds and episodes of a config."""
    idx = {c: i for i, c in enumerate(csvio.EPISODES)}

    def median(config, scenario, column):
        vals = [r[idx[column]] for r in episodes if r[idx["config"]] == config and r[idx["scenario"]] == scenario]
        return float(np.median(vals)) if vals else None

    out = {"hard_pos_large_dr_le_naive": {}, "ang_small_dr_worst": {}}
    naive = median("naive", "hard", "final_pos_err_m")
    for cfg in ("large_dr", "large_dr_history"):
        val = median(cfg, "hard", "final_pos_err_m")
        if naive is not None and val is not None:
            out["hard_pos_large_dr_le_naive"][cfg] = {"median": val, "naive_median": naive, "holds": val <= naive}
    scenarios = sorted({r[idx["scenario"]] for r in episodes})
    for scenario in scenarios:
        medians = {c: median(c, scenario, "final_ang_err_rad") for c in PRESET_NAMES}
        medians = {c: v for c, v in medians.items() if v is not None}
        if "small_dr" in medians:
            worst = max(medians, key=medians.get)
            out["ang_small_dr_worst"][scenario] = {"medians": medians, "worst": worst, "holds": worst == "small_dr"}
    return out


def run_matrix(
    runs,
    configs=PRESET_NAMES,
    scenarios=SCENARIO_NAMES,
    seeds=(0, 1, 2),
    episodes: int | None = None,
    reports=None,
) -> MatrixReport:
    runs = Path(runs)
    reports = Path(reports) if reports is not None else runs.parent / "reports"
    report = MatrixReport()
    evaluated = set()
    if not scenarios:
        return report
    for config in configs:
        for seed in seeds:
            ckpt = run_dir(runs, config, seed) / "checkpoints" / "final.ckpt"
            if not ckpt.is_file():
                log.error("missing checkpoint %s", ckpt)
                report.missing.append(str(ckpt))
                continue
            for name in scenarios:
                result = evaluate(ckpt, get_scenario(name, episodes))
                write_eval(result, run_dir(runs, config, seed) / "eval" / f"{name}.csv")
                report.summary.append(result.summary_row())
                report.episodes.extend(result.episode_rows())
                evaluated.add((config, seed, name))

    reports.mkdir(parents=True, exist_ok=True)
    csvio.write_csv(reports / "episodes.csv", csvio.EPISODES, report.episodes)
    csvio.write_csv(reports / "summary.csv", csvio.SUMMARY, report.summary)
    tree = {k: v for k, v in plotting.read_eval_tree(runs).items() if k in evaluated}
    curves = plotting.aggregate(tree)
    csvio.write_csv(reports / "curves.csv", csvio.CURVES, _curve_rows(curves))
    report.plots = plotting.plot_curves(curves, reports)
    report.ordering = qualitative_ordering(report.episodes)
    (reports / "ordering.json").write_text(json.dumps(report.ordering, indent=2, sort_keys=True) + "\n")
    if report.missing:
        (reports / "missing.txt").write_text("\n".join(report.missing) + "\n")
    return report


def _curve_rows(curves):
    keys = sorted({(c, s) for c, s, _ in curves})
    for config, scenario in keys:
        pos, ang = curves[(config, scenario, "pos")], curves[(config, scenario, "ang")]
        for k in range(len(pos.time_s)):
            yield (config, scenario, k + 1, pos.time_s[k], pos.mean[k], pos.std[k], ang.mean[k], ang.std[k], pos.n_seeds)
