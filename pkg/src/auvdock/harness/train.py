"""PPO training loop: collect -> GAE -> update, with CSV log and checkpoints."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..actuation import NUM_THRUSTERS
from ..checkpoint import Checkpoint, save_checkpoint
from ..envdock import DockingEnv, normalize_observation
from ..learner import AdamState, DivergenceError, PolicyParams, RolloutBatch, forward, ppo_update, sample_from
from . import csvio
from .config import TrainingConfig, dump_config

log = logging.getLogger(__name__)

POLICY_STREAM = 1_000_003  # RNG stream tag, distinct from env lane indices


def run_dir(out, config_name: str, seed: int) -> Path:
    return Path(out) / config_name / str(seed)


def policy_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), POLICY_STREAM]))


@dataclass
class TrainResult:
    run_dir: Path
    checkpoint: Path
    params: PolicyParams
    rows: list = field(default_factory=list)


def collect_rollout(env: DockingEnv, params: PolicyParams, rng, rollout_len: int, obs: np.ndarray, gamma: float):
    """Step every lane ``rollout_len`` times with sampled actions.

    Time-limit truncations are treated as terminal for GAE, but the reward of
    the truncating step gets ``gamma * V(final_obs)`` added so the cut-off
    tail is still valued. Returns the batch, the next observation and the
    returns of full-length episodes that finished.
    """
    n = env.num_envs
    buf_obs = np.zeros((rollout_len, n, obs.shape[1]))
    buf_act = np.zeros((rollout_len, n, NUM_THRUSTERS))
    buf_logp = np.zeros((rollout_len, n))
    buf_rew = np.zeros((rollout_len, n))
    buf_val = np.zeros((rollout_len, n))
    buf_done = np.zeros((rollout_len, n))
    finished = []
    for t in range(rollout_len):
        nobs = normalize_observation(obs)
        mean, value = forward(params, nobs)
        action, logp = sample_from(mean, params.log_std, rng)
        next_obs, reward, terminated, info = env.step(action)
        reward = reward.copy()
        trunc = info["truncated"]
        if trunc.any():
            _, v_final = forward(params, normalize_observation(info["final_obs"][trunc]))
            reward[trunc] += gamma * v_final
        finished.extend(info["episode_return"][info["episode_full"]].tolist())
        buf_obs[t], buf_act[t], buf_logp[t] = nobs, action, logp
        buf_rew[t], buf_val[t], buf_done[t] = reward, value, terminated
        obs = next_obs
    _, last_values = forward(params, normalize_observation(obs))
    batch = RolloutBatch(buf_obs, buf_act, buf_logp, buf_rew, buf_val, buf_done, last_values)
    return batch, obs, finished


def _save(path, params, optimizer, cfg, seed, iteration, rng):
    save_checkpoint(
        path,
        Checkpoint(
            params=params,
            optimizer=optimizer,
            config=cfg.to_dict(),
            config_hash=cfg.hash(),
            config_name=cfg.name,
            seed=seed,
            iteration=iteration,
            rng_state=rng.bit_generator.state,
        ),
    )


def train(cfg: TrainingConfig, seed: int, out="runs", record_wall_time: bool = False) -> TrainResult:
    """Train one (config, seed) cell into ``out/<config>/<seed>/``.

    ``wall_s`` is only measured when ``record_wall_time`` is set; otherwise it
    is written as nan so that repeated runs produce identical logs.
    """
    cfg.validate()
    ppo = cfg.ppo
    rdir = run_dir(out, cfg.name, seed)
    ckpt_dir = rdir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    (rdir / "config.yaml").write_text(dump_config(cfg))
    log_path = rdir / "train_log.csv"
    csvio.write_csv(log_path, csvio.TRAIN_LOG, [])

    rng = policy_rng(seed)
    params = PolicyParams.init(rng, cfg.env.obs_dim, NUM_THRUSTERS, tuple(ppo.hidden_sizes), ppo.init_log_std)
    optimizer = AdamState.zeros_like(params, eps=ppo.adam_eps)
    env = DockingEnv(cfg.env, cfg.dr, cfg.vehicle, num_envs=ppo.num_envs, seed=seed)
    obs = env.reset(stagger=True)

    result = TrainResult(rdir, ckpt_dir / "final.ckpt", params)
    start = time.perf_counter()
    for it in range(1, ppo.iterations + 1):
        lr = ppo.learning_rate * (1.0 - (it - 1) / ppo.iterations) if ppo.lr_decay else ppo.learning_rate
        batch, obs, finished = collect_rollout(env, params, rng, ppo.rollout_len, obs, ppo.gamma)
        try:
            params, stats = ppo_update(params, batch, ppo, optimizer, rng, lr)
        except DivergenceError:
            _save(ckpt_dir / "last_good.ckpt", params, optimizer, cfg, seed, it - 1, rng)
            log.error("%s seed %d diverged at iteration %d", cfg.name, seed, it)
            raise
        mean_return = float(np.mean(finished)) if finished else float("nan")
        wall = time.perf_counter() - start if record_wall_time else float("nan")
        row = (it, mean_return, stats["actor_loss"], stats["critic_loss"], stats["clip_frac"], stats["kl_proxy"], wall)
        csvio.append_csv_row(log_path, csvio.TRAIN_LOG, row)
        result.rows.append(row)
        log.info("%s seed %d iter %d return %.3f clip %.3f", cfg.name, seed, it, mean_return, stats["clip_frac"])
        if it % cfg.checkpoint_every == 0 and it != ppo.iterations:
            _save(ckpt_dir / f"iter_{it:05d}.ckpt", params, optimizer, cfg, seed, it, rng)
    _save(result.checkpoint, params, optimizer, cfg, seed, ppo.iterations, rng)
    result.params = params
    return result
