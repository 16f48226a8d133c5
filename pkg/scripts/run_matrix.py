"""Train every preset x seed, then evaluate all of them on every payload scenario.

    python3 scripts/run_matrix.py --scale desk --runs runs --reports reports

Cells that already hold a final checkpoint for the same resolved config are
not retrained, so an interrupted sweep can simply be restarted.
"""
import argparse
import json
import logging
import time

from auvdock.checkpoint import load_checkpoint
from auvdock.harness.config import PRESET_NAMES, SCENARIO_NAMES, SCALES, preset_config
from auvdock.harness.matrix import run_matrix
from auvdock.harness.train import run_dir, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", choices=sorted(SCALES), default="desk")
    ap.add_argument("--runs", default="runs")
    ap.add_argument("--reports", default="reports")
    ap.add_argument("--configs", default=",".join(PRESET_NAMES))
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--episodes", type=int, default=20)
    ap.add_argument("--force", action="store_true", help="retrain cells that already have a checkpoint")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    configs = args.configs.split(",")
    seeds = [int(s) for s in args.seeds.split(",")]
    for name in configs:
        cfg = preset_config(name, args.scale)
        for seed in seeds:
            ckpt = run_dir(args.runs, name, seed) / "checkpoints" / "final.ckpt"
            if not args.force and ckpt.is_file() and load_checkpoint(ckpt).config_hash == cfg.hash():
                logging.info("skip %s seed %d (checkpoint up to date)", name, seed)
                continue
            t0 = time.perf_counter()
            train(cfg, seed, args.runs)
            logging.info("trained %s seed %d in %.0f s", name, seed, time.perf_counter() - t0)

    report = run_matrix(args.runs, configs, SCENARIO_NAMES, seeds, episodes=args.episodes, reports=args.reports)
    print(f"episode records: {len(report.episodes)}")
    for row in report.summary:
        print(",".join(str(v) for v in row))
    print(json.dumps(report.ordering, indent=2, sort_keys=True))
    return 0 if report.complete else 3


if __name__ == "__main__":
    raise SystemExit(main())
