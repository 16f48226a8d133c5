"""Command line entry point.

Exit codes: 0 success, 1 validation error, 2 divergence, 3 missing artifacts.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .checkpoint import CheckpointError, load_checkpoint
from .harness import csvio
from .harness.config import PRESET_NAMES, SCALES, SCENARIO_NAMES, ConfigError, get_scenario, load_config, preset_config
from .harness.csvio import CsvSchemaError
from .harness.evaluate import evaluate, write_eval
from .harness.matrix import run_matrix
from .harness.plotting import plot
from .harness.train import train
from .learner import DivergenceError

EXIT_OK, EXIT_VALIDATION, EXIT_DIVERGENCE, EXIT_MISSING = 0, 1, 2, 3


def _cmd_train(args) -> int:
    if args.config in PRESET_NAMES and not Path(args.config).exists():
        cfg = preset_config(args.config, args.scale)
    else:
        cfg = load_config(args.config, args.scale)
    result = train(cfg, args.seed, args.out, record_wall_time=args.wall_time)
    print(f"checkpoint: {result.checkpoint}")
    print(f"log: {result.run_dir / 'train_log.csv'}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    scenario = get_scenario(args.scenario, args.episodes)
    result = evaluate(args.checkpoint, scenario, seed=args.seed)
    if args.out is not None:
        out = Path(args.out)
    else:
        # checkpoints/<file> -> <run>/eval/<scenario>.csv
        out = Path(args.checkpoint).resolve().parent.parent / "eval" / f"{scenario.name}.csv"
    write_eval(result, out)
    summary = out.with_name(f"{scenario.name}_summary.csv")
    csvio.write_csv(summary, csvio.SUMMARY, [result.summary_row()])
    print(f"eval: {out}")
    print(csvio.rows_to_text(csvio.SUMMARY, [result.summary_row()]), end="")
    return EXIT_OK


def _cmd_matrix(args) -> int:
    scenarios = SCENARIO_NAMES if args.scenarios is None else tuple(s for s in args.scenarios.split(",") if s)
    for s in scenarios:
        get_scenario(s)
    report = run_matrix(
        args.runs,
        configs=tuple(args.configs.split(",")) if args.configs else PRESET_NAMES,
        scenarios=scenarios,
        seeds=tuple(int(s) for s in args.seeds.split(",")),
        episodes=args.episodes,
        reports=args.reports,
    )
    print(f"episode records: {len(report.episodes)}")
    for p in report.plots:
        print(f"plot: {p}")
    for m in report.missing:
        print(f"missing: {m}", file=sys.stderr)
    return EXIT_OK if report.complete else EXIT_MISSING


def _cmd_plot(args) -> int:
    if not Path(args.input).is_dir():
        print(f"input directory not found: {args.input}", file=sys.stderr)
        return EXIT_MISSING
    for p in plot(args.input, args.out):
        print(f"plot: {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auvdock", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one (config, seed) cell")
    p.add_argument("--config", required=True, help="YAML config file or preset name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p.add_argument("--out", default="runs")
    p.add_argument("--wall-time", action="store_true", help="record wall_s in the log (breaks byte-reproducibility)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on one scenario")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="defaults to the checkpoint's training seed")
    p.add_argument("--out", default=None, help="eval CSV path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("matrix", help="evaluate every config x seed x scenario and report")
    p.add_argument("--runs", required=True)
    p.add_argument("--reports", default=None, help="defaults to <runs>/../reports")
    p.add_argument("--configs", default=None, help="comma-separated preset names")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--scenarios", default=None, help="comma-separated; empty string for none")
    p.add_argument("--episodes", type=int, default=None)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("plot", help="plot error curves from a run tree")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CsvSchemaError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except FileNotFoundError as exc:
        print(f"missing: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
