"""Does PPO learn the unloaded docking task? Compares a trained naive policy
with uniform random commands and reports final errors on the easy scenario.

    python3 scripts/learning_check.py --scale desk --seed 0

With ``--scale paper`` (500 iterations) it also reports how close the return
at iteration 300 is to the final one, as a convergence-speed indicator.
"""
import argparse
import time

import numpy as np

from auvdock.checkpoint import load_checkpoint
from auvdock.harness import csvio
from auvdock.harness.config import SCALES, get_scenario, preset_config
from auvdock.harness.evaluate import evaluate, random_policy_return
from auvdock.harness.train import run_dir, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", choices=sorted(SCALES), default="desk")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--runs", default="runs")
    args = ap.parse_args()

    cfg = preset_config("naive", args.scale)
    ckpt = run_dir(args.runs, "naive", args.seed) / "checkpoints" / "final.ckpt"
    if ckpt.is_file() and load_checkpoint(ckpt).config_hash == cfg.hash():
        print(f"reusing {ckpt}")
    else:
        t0 = time.perf_counter()
        ckpt = train(cfg, args.seed, args.runs).checkpoint
        print(f"trained in {time.perf_counter() - t0:.0f} s")

    rows = csvio.read_csv(ckpt.parent.parent / "train_log.csv", csvio.TRAIN_LOG)
    returns = np.array([r[1] for r in rows])
    tail = returns[-10:][np.isfinite(returns[-10:])]
    trained = float(tail.mean()) if tail.size else float("nan")
    baseline = random_policy_return(cfg, num_envs=cfg.ppo.num_envs, seed=args.seed)
    print(f"mean return, last 10 iterations: {trained:.2f}")
    print(f"random-command baseline:         {baseline:.2f}  (ratio {trained / baseline:.2f})")

    result = evaluate(ckpt, get_scenario("easy"))
    print(f"easy scenario: median final position error {np.median(result.final_pos_err):.3f} m, "
          f"median final angle error {np.median(result.final_ang_err):.3f} rad, "
          f"success rate {np.mean(result.success):.2f}")

    if len(returns) >= 500 and np.isfinite(returns[299]) and np.isfinite(returns[499]):
        gap = abs(returns[299] - returns[499]) / abs(returns[499])
        print(f"return at iteration 300 is within {100 * gap:.1f}% of iteration 500")


if __name__ == "__main__":
    main()
