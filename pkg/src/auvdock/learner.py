"""Numpy actor-critic PPO with hand-written reverse-mode gradients.

Actor and critic are separate tanh MLPs. The policy is a diagonal Gaussian
whose log-std is a free, state-independent vector. Parameters live in an
ordered dict of arrays so the optimizer, checkpointing and finite-difference
checks can all treat them uniformly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LOG_STD_MIN, LOG_STD_MAX = -5.0, 2.0
LOG_2PI = np.log(2 * np.pi)


class DivergenceError(FloatingPointError):
    """Non-finite loss or gradient during an update."""


@dataclass
class PpoConfig:
    clip_ratio: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 3e-4
    lr_decay: bool = True
    epochs: int = 5
    minibatches: int = 4
    value_coef: float = 0.5
    entropy_coef: float = 0.0
    max_grad_norm: float = 1.0
    rollout_len: int = 32
    num_envs: int = 2048
    iterations: int = 500
    hidden_sizes: list = field(default_factory=lambda: [128, 128])
    init_log_std: float = 0.0
    adam_eps: float = 1e-8

    def validate(self) -> None:
        if not 0 < self.clip_ratio < 1:
            raise ValueError("clip_ratio must be in (0, 1)")
        if not (0 < self.gamma <= 1 and 0 < self.gae_lambda <= 1):
            raise ValueError("gamma and gae_lambda must be in (0, 1]")
        if self.iterations < 0 or self.epochs < 1 or self.minibatches < 1:
            raise ValueError("iterations >= 0, epochs >= 1 and minibatches >= 1 required")
        if self.rollout_len < 1 or self.num_envs < 1:
            raise ValueError("rollout_len and num_envs must be positive")
        if self.num_envs * self.rollout_len < self.minibatches:
            raise ValueError("batch smaller than the minibatch count")


class PolicyParams:
    """Actor/critic weights plus the log-std vector, keyed by name."""

    def __init__(self, tensors: dict[str, np.ndarray]):
        self.tensors = tensors
        self.n_actor = sum(1 for k in tensors if k.startswith("actor/") and k.endswith("/W"))
        self.n_critic = sum(1 for k in tensors if k.startswith("critic/") and k.endswith("/W"))

    @classmethod
    def init(cls, rng: np.random.Generator, obs_dim: int, act_dim: int, hidden=(128, 128), init_log_std=0.0):
        tensors = {}
        for net, out_dim, out_gain in (("actor", act_dim, 0.01), ("critic", 1, 1.0)):
            sizes = [obs_dim, *hidden, out_dim]
            for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
                gain = out_gain if i == len(sizes) - 2 else np.sqrt(2.0)
                tensors[f"{net}/{i}/W"] = _orthogonal(rng, n_in, n_out, gain)
                tensors[f"{net}/{i}/b"] = np.zeros(n_out)
        tensors["log_std"] = np.full(act_dim, float(init_log_std))
        return cls(tensors)

    @property
    def obs_dim(self) -> int:
        return self.tensors["actor/0/W"].shape[0]

    @property
    def act_dim(self) -> int:
        return self.tensors["log_std"].shape[0]

    @property
    def log_std(self) -> np.ndarray:
        return self.tensors["log_std"]

    def copy(self) -> "PolicyParams":
        return PolicyParams({k: v.copy() for k, v in self.tensors.items()})

    def flat(self) -> np.ndarray:
        return np.concatenate([v.ravel() for v in self.tensors.values()])

    def from_flat(self, vec: np.ndarray) -> "PolicyParams":
        out, i = {}, 0
        for k, v in self.tensors.items():
            out[k] = vec[i : i + v.size].reshape(v.shape).copy()
            i += v.size
        return PolicyParams(out)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in self.tensors.values())


def _orthogonal(rng, n_in, n_out, gain):
    a = rng.standard_normal((max(n_in, n_out), min(n_in, n_out)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if n_in < n_out:
        q = q.T
    return gain * q[:n_in, :n_out]


def _mlp_forward(t, net, n_layers, x):
    acts = [x]
    h = x
    for i in range(n_layers):
        z = h @ t[f"{net}/{i}/W"] + t[f"{net}/{i}/b"]
        h = np.tanh(z) if i < n_layers - 1 else z
        acts.append(h)
    return h, acts


def _mlp_backward(t, net, n_layers, acts, dout, grads):
    g = dout
    for i in reversed(range(n_layers)):
        if i < n_layers - 1:
            g = g * (1.0 - acts[i + 1] ** 2)
        grads[f"{net}/{i}/W"] = acts[i].T @ g
        grads[f"{net}/{i}/b"] = g.sum(axis=0)
        if i > 0:
            g = g @ t[f"{net}/{i}/W"].T


def forward(params: PolicyParams, obs: np.ndarray):
    """Action mean (..., act_dim) and value (...,) for observations."""
    obs = np.asarray(obs, dtype=float)
    if obs.shape[-1] != params.obs_dim:
        raise ValueError(f"observation width {obs.shape[-1]} != policy input width {params.obs_dim}")
    flat = obs.reshape(-1, obs.shape[-1])
    mean, _ = _mlp_forward(params.tensors, "actor", params.n_actor, flat)
    value, _ = _mlp_forward(params.tensors, "critic", params.n_critic, flat)
    batch = obs.shape[:-1]
    return mean.reshape(batch + (params.act_dim,)), value.reshape(batch)


def gaussian_log_prob(actions, mean, log_std) -> np.ndarray:
    z = (actions - mean) * np.exp(-log_std)
    k = mean.shape[-1]
    return -0.5 * np.sum(z * z, axis=-1) - np.sum(log_std) - 0.5 * k * LOG_2PI


def gaussian_entropy(log_std) -> float:
    return float(np.sum(log_std + 0.5 * (LOG_2PI + 1.0)))


def sample_from(mean, log_std, rng: np.random.Generator):
    actions = mean + np.exp(log_std) * rng.standard_normal(mean.shape)
    return actions, gaussian_log_prob(actions, mean, log_std)


def sample_action(params: PolicyParams, obs, rng: np.random.Generator):
    mean, _ = forward(params, obs)
    return sample_from(mean, params.log_std, rng)


# ---------------------------------------------------------------------------
# advantage estimation


@dataclass
class RolloutBatch:
    obs: np.ndarray  # (T, N, D)
    actions: np.ndarray  # (T, N, A), pre-clamp samples
    log_probs: np.ndarray  # (T, N)
    rewards: np.ndarray  # (T, N)
    values: np.ndarray  # (T, N)
    dones: np.ndarray  # (T, N)
    last_values: np.ndarray  # (N,)


def compute_gae(batch: RolloutBatch, gamma: float, lam: float):
    """Generalized advantage estimates and value targets, shape (T, N)."""
    rewards = np.asarray(batch.rewards, dtype=float)
    values = np.asarray(batch.values, dtype=float)
    notdone = 1.0 - np.asarray(batch.dones, dtype=float)
    horizon = rewards.shape[0]
    adv = np.zeros_like(rewards)
    next_value = np.asarray(batch.last_values, dtype=float)
    running = np.zeros_like(next_value)
    for t in reversed(range(horizon)):
        delta = rewards[t] + gamma * next_value * notdone[t] - values[t]
        running = delta + gamma * lam * notdone[t] * running
        adv[t] = running
        next_value = values[t]
    return adv, adv + values


def normalize_advantages(adv: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    return (adv - adv.mean()) / (adv.std() + eps)


# ---------------------------------------------------------------------------
# loss and update


def ppo_loss(params: PolicyParams, obs, actions, old_log_probs, advantages, returns, cfg: PpoConfig):
    """Clipped-surrogate PPO loss, its gradient and diagnostics."""
    t = params.tensors
    mean, a_acts = _mlp_forward(t, "actor", params.n_actor, obs)
    value_out, c_acts = _mlp_forward(t, "critic", params.n_critic, obs)
    value = value_out[:, 0]
    log_std = t["log_std"]
    inv_std = np.exp(-log_std)
    z = (actions - mean) * inv_std
    logp = -0.5 * np.sum(z * z, axis=-1) - np.sum(log_std) - 0.5 * mean.shape[1] * LOG_2PI

    log_ratio = logp - old_log_probs
    ratio = np.exp(log_ratio)
    clipped = np.clip(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio)
    surr1 = ratio * advantages
    surr2 = clipped * advantages
    n = obs.shape[0]
    policy_loss = -np.mean(np.minimum(surr1, surr2))
    value_loss = np.mean((value - returns) ** 2)
    entropy = gaussian_entropy(log_std)
    loss = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy

    # the min picks the unclipped branch whenever it is not larger; the clipped
    # branch is flat in the parameters once clipping is active
    unclipped = surr1 <= surr2
    dlogp = -(advantages * ratio * unclipped) / n
    grads: dict[str, np.ndarray] = {}
    dmean = dlogp[:, None] * z * inv_std
    _mlp_backward(t, "actor", params.n_actor, a_acts, dmean, grads)
    dvalue = (2.0 * cfg.value_coef / n) * (value - returns)
    _mlp_backward(t, "critic", params.n_critic, c_acts, dvalue[:, None], grads)
    grads["log_std"] = dlogp @ (z * z - 1.0) - cfg.entropy_coef
    grads = {k: grads[k] for k in t}

    stats = {
        "loss": float(loss),
        "actor_loss": float(policy_loss),
        "critic_loss": float(value_loss),
        "entropy": entropy,
        "clip_frac": float(np.mean(np.abs(ratio - 1.0) > cfg.clip_ratio)),
        "kl_proxy": float(np.mean((ratio - 1.0) - log_ratio)),
    }
    return float(loss), grads, stats


@dataclass
class AdamState:
    m: dict
    v: dict
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: PolicyParams, eps: float = 1e-8) -> "AdamState":
        return cls(
            {k: np.zeros_like(v) for k, v in params.tensors.items()},
            {k: np.zeros_like(v) for k, v in params.tensors.items()},
            eps=eps,
        )

    def apply(self, params: PolicyParams, grads: dict, lr: float) -> None:
        """In-place Adam step on ``params``."""
        self.step += 1
        c1 = 1.0 - self.beta1**self.step
        c2 = 1.0 - self.beta2**self.step
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            params.tensors[k] -= lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


def clip_grad_norm(grads: dict, max_norm: float):
    norm = float(np.sqrt(sum(np.sum(g * g) for g in grads.values())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        grads = {k: g * scale for k, g in grads.items()}
    return grads, norm


def ppo_update(
    params: PolicyParams,
    batch: RolloutBatch,
    cfg: PpoConfig,
    optimizer: AdamState,
    rng: np.random.Generator,
    lr: float | None = None,
):
    """Several epochs of minibatch PPO on one rollout. Returns (new params, stats).

    ``optimizer`` is advanced in place.
    """
    lr = cfg.learning_rate if lr is None else lr
    adv, returns = compute_gae(batch, cfg.gamma, cfg.gae_lambda)
    size = adv.size
    obs = batch.obs.reshape(size, -1)
    actions = batch.actions.reshape(size, -1)
    old_logp = batch.log_probs.reshape(size)
    adv = normalize_advantages(adv.reshape(size))
    returns = returns.reshape(size)

    params = params.copy()
    totals = {"actor_loss": 0.0, "critic_loss": 0.0, "clip_frac": 0.0, "kl_proxy": 0.0, "grad_norm": 0.0}
    count = 0
    first_clip = None
    for _ in range(cfg.epochs):
        order = rng.permutation(size)
        for idx in np.array_split(order, cfg.minibatches):
            loss, grads, stats = ppo_loss(params, obs[idx], actions[idx], old_logp[idx], adv[idx], returns[idx], cfg)
            if first_clip is None:
                first_clip = stats["clip_frac"]
            if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads.values()):
                raise DivergenceError(f"non-finite PPO loss ({loss}) after {optimizer.step} optimizer steps")
            grads, norm = clip_grad_norm(grads, cfg.max_grad_norm)
            optimizer.apply(params, grads, lr)
            np.clip(params.tensors["log_std"], LOG_STD_MIN, LOG_STD_MAX, out=params.tensors["log_std"])
            for key in ("actor_loss", "critic_loss", "clip_frac", "kl_proxy"):
                totals[key] += stats[key]
            totals["grad_norm"] += norm
            count += 1
    stats = {k: v / count for k, v in totals.items()}
    stats["first_clip_frac"] = first_clip
    if not params.is_finite():
        raise DivergenceError("non-finite parameters after update")
    return params, stats
