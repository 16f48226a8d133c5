"""Deterministic-policy evaluation under the fixed payload scenarios."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..checkpoint import load_checkpoint
from ..envdock import DockingEnv, DomainRandomization, normalize_observation
from ..learner import PolicyParams, forward
from . import csvio
from .config import ConfigError, EvalScenario, TrainingConfig

EVAL_SEED_OFFSET = 10_000


def eval_seed(train_seed: int) -> int:
    """Seed for evaluation start positions; configs sharing a training seed see the same starts."""
    return int(train_seed) + EVAL_SEED_OFFSET


@dataclass
class EvalResult:
    config_name: str
    seed: int
    scenario: str
    dt: float
    pos_err: np.ndarray  # (episodes, steps), nan after a fault
    ang_err: np.ndarray
    returns: np.ndarray
    success: np.ndarray
    faulted: np.ndarray

    @property
    def final_pos_err(self) -> np.ndarray:
        return self.pos_err[:, -1]

    @property
    def final_ang_err(self) -> np.ndarray:
        return self.ang_err[:, -1]

    def series_rows(self):
        for ep in range(self.pos_err.shape[0]):
            for k in range(self.pos_err.shape[1]):
                if np.isnan(self.pos_err[ep, k]):
                    break
                yield (ep, k + 1, (k + 1) * self.dt, self.pos_err[ep, k], self.ang_err[ep, k])

    def summary_row(self):
        return (
            self.config_name,
            self.seed,
            self.scenario,
            float(np.median(self.final_pos_err)),
            float(np.mean(self.final_pos_err)),
            float(np.median(self.final_ang_err)),
            float(np.mean(self.success)),
        )

    def episode_rows(self):
        for ep in range(len(self.returns)):
            yield (
                self.config_name, self.seed, self.scenario, ep,
                self.final_pos_err[ep], self.final_ang_err[ep], int(self.success[ep]), self.returns[ep],
            )


def rollout_policy(params: PolicyParams, env: DockingEnv, deterministic: bool = True, rng=None):
    """Run every lane of ``env`` for one episode. Returns per-step errors,
    rewards and the terminal success flags."""
    steps, n = env.cfg.episode_len, env.num_envs
    pos = np.full((n, steps), np.nan)
    ang = np.full((n, steps), np.nan)
    rewards = np.zeros((n, steps))
    alive = np.ones(n, dtype=bool)
    success = np.zeros(n, dtype=bool)
    obs = env.reset()
    for k in range(steps):
        mean, _ = forward(params, normalize_observation(obs))
        action = mean if deterministic else mean + np.exp(params.log_std) * rng.standard_normal(mean.shape)
        obs, reward, terminated, info = env.step(action)
        alive &= ~info["fault"]
        pos[alive, k] = info["pos_err"][alive]
        ang[alive, k] = info["ang_err"][alive]
        rewards[alive, k] = reward[alive]
        if k == steps - 1:
            success = info["success"] & alive
    return pos, ang, rewards, success, ~alive


def evaluate_params(
    params: PolicyParams,
    cfg: TrainingConfig,
    scenario: EvalScenario,
    seed: int,
    config_name: str | None = None,
) -> EvalResult:
    if params.obs_dim != cfg.env.obs_dim:
        raise ConfigError(
            f"checkpoint expects observations of width {params.obs_dim}, "
            f"but the environment (history_len={cfg.env.history_len}) produces {cfg.env.obs_dim}"
        )
    env = DockingEnv(
        cfg.env, DomainRandomization(enabled=False), cfg.vehicle,
        num_envs=scenario.episodes, seed=eval_seed(seed), payload=scenario.payload,
    )
    pos, ang, rewards, success, faulted = rollout_policy(params, env)
    return EvalResult(
        config_name or cfg.name, seed, scenario.name, cfg.env.dt, pos, ang, rewards.sum(axis=1), success, faulted
    )


def evaluate(checkpoint, scenario: EvalScenario, seed: int | None = None, env_override: dict | None = None) -> EvalResult:
    """Evaluate a checkpoint file; ``seed`` defaults to its training seed."""
    ckpt = load_checkpoint(checkpoint)
    data = ckpt.config
    if env_override:
        data = {**data, "env": {**data["env"], **env_override}}
        data["history_len"] = data["env"]["history_len"]
    cfg = TrainingConfig.from_dict(data)
    return evaluate_params(ckpt.params, cfg, scenario, ckpt.seed if seed is None else seed, ckpt.config_name)


def write_eval(result: EvalResult, path) -> Path:
    path = Path(path)
    csvio.write_csv(path, csvio.EVAL, result.series_rows())
    return path


def random_policy_return(cfg: TrainingConfig, num_envs: int = 256, seed: int = 0) -> float:
    """Mean full-episode return of uniform random commands in [-1, 1]^8
    (the baseline a trained policy is compared against)."""
    env = DockingEnv(cfg.env, cfg.dr, cfg.vehicle, num_envs=num_envs, seed=seed)
    env.reset()
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 7]))
    total = np.zeros(num_envs)
    for _ in range(cfg.env.episode_len):
        _, reward, _, _ = env.step(rng.uniform(-1.0, 1.0, (num_envs, env.layout.positions.shape[0])))
        total += reward
    return float(total.mean())
