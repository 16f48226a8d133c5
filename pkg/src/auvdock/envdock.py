"""Docking MDP: reset sampling, payload randomization, observations, reward.

The dock is a goal region, not collision geometry. ``dock_opening_axis`` is
the direction of travel through the open face into the dock, so with the
default +x the vehicle starts on the -x side facing the dock at identity
attitude.

Observation frame (21 values): dock position minus vehicle position (world),
attitude quaternion (w >= 0), world linear velocity, ZYX Euler rates, and the
clamped command applied on the previous step. History stacks ``h`` frames
oldest-first.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actuation import NUM_THRUSTERS, body_wrench, clamp_command
from .hydro import added_mass, restoring_wrench
from .rigidbody import (
    BodyState,
    MassProperties,
    PayloadSpec,
    Wrench,
    compose_payload,
    euler_rates,
    euler_to_quat,
    integrate_step,
    quat_to_euler,
    wrap_angle,
)
from .vehicle import VehicleConfig

FRAME_SIZE = 3 + 4 + 3 + 3 + NUM_THRUSTERS
# fixed policy-input scales: positions / 2 m, velocities / 1, quaternion and actions raw
FRAME_SCALE = np.array([2.0] * 3 + [1.0] * 4 + [1.0] * 3 + [1.0] * 3 + [1.0] * NUM_THRUSTERS)


@dataclass
class DockingConfig:
    dock_position: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    dock_opening_axis: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    dock_inner_size: float = 0.7
    start_region_size: float = 2.0
    start_clearance: float | None = None  # gap between opening and start cube; None -> dock_inner_size
    episode_len: int = 400
    dt: float = 0.05
    reward_lambda1: float = 0.2
    reward_lambda2: float = 0.03
    history_len: int = 1
    target_euler: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    success_pos_err: float = 0.15
    success_ang_err: float = 0.25
    attitude_jitter: float = 0.0  # rad, uniform per Euler angle; 0 keeps identity

    def validate(self) -> None:
        if self.history_len < 1:
            raise ValueError("history_len must be >= 1")
        if self.dock_inner_size <= 0 or self.start_region_size <= 0:
            raise ValueError("dock and start region sizes must be positive")
        if self.episode_len < 1 or self.dt <= 0:
            raise ValueError("episode_len and dt must be positive")
        axis = np.asarray(self.dock_opening_axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ValueError("dock_opening_axis must be a unit vector")

    @property
    def obs_dim(self) -> int:
        return FRAME_SIZE * self.history_len


@dataclass
class DomainRandomization:
    enabled: bool = False
    mass_upper: float = 0.0
    spawn_radius: float = 0.0
    offset_mode: str = "surface"  # or "ball"

    def validate(self) -> None:
        if self.mass_upper < 0 or self.spawn_radius < 0:
            raise ValueError("mass_upper and spawn_radius must be non-negative")
        if self.offset_mode not in ("surface", "ball"):
            raise ValueError(f"unknown offset_mode {self.offset_mode!r}")


def sample_payload(rng: np.random.Generator, dr: DomainRandomization) -> PayloadSpec:
    if not dr.enabled:
        return PayloadSpec(0.0, np.zeros(3))
    mass = rng.uniform(0.0, dr.mass_upper)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    radius = dr.spawn_radius
    if dr.offset_mode == "ball":
        radius *= rng.uniform() ** (1.0 / 3.0)
    return PayloadSpec(float(mass), radius * direction)


def _axis_frame(axis) -> np.ndarray:
    """Rows: the entry axis and two unit vectors orthogonal to it."""
    axis = np.asarray(axis, dtype=float)
    helper = np.array([0.0, 0.0, 1.0]) if abs(axis[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(helper, axis)
    u /= np.linalg.norm(u)
    return np.stack([axis, u, np.cross(axis, u)])


def start_region(cfg: DockingConfig) -> tuple[np.ndarray, np.ndarray]:
    """Centre of the start cube and its axis frame (rows)."""
    frame = _axis_frame(cfg.dock_opening_axis)
    clearance = cfg.dock_inner_size if cfg.start_clearance is None else cfg.start_clearance
    back = cfg.dock_inner_size / 2 + clearance + cfg.start_region_size / 2
    center = np.asarray(cfg.dock_position, dtype=float) - back * frame[0]
    return center, frame


def sample_start_position(rng: np.random.Generator, cfg: DockingConfig) -> np.ndarray:
    center, frame = start_region(cfg)
    local = rng.uniform(-0.5, 0.5, size=3) * cfg.start_region_size
    return center + local @ frame


def position_error(state: BodyState, cfg: DockingConfig) -> np.ndarray:
    return np.linalg.norm(state.position - np.asarray(cfg.dock_position, dtype=float), axis=-1)


def angular_error(state: BodyState, cfg: DockingConfig) -> np.ndarray:
    diff = wrap_angle(quat_to_euler(state.attitude) - np.asarray(cfg.target_euler, dtype=float))
    return np.linalg.norm(diff, axis=-1)


def compute_reward(state: BodyState, cfg: DockingConfig) -> np.ndarray:
    return cfg.reward_lambda1 * np.exp(-position_error(state, cfg)) + cfg.reward_lambda2 * np.exp(
        -angular_error(state, cfg)
    )


def assemble_observation(state: BodyState, prev_action, cfg: DockingConfig) -> np.ndarray:
    rel = np.asarray(cfg.dock_position, dtype=float) - state.position
    quat = np.where(state.attitude[..., :1] < 0, -state.attitude, state.attitude)
    rates = euler_rates(state.attitude, state.ang_vel)
    prev = np.broadcast_to(np.asarray(prev_action, dtype=float), rel.shape[:-1] + (NUM_THRUSTERS,))
    return np.concatenate([rel, quat, state.lin_vel, rates, prev], axis=-1)


def normalize_observation(obs: np.ndarray) -> np.ndarray:
    reps = obs.shape[-1] // FRAME_SIZE
    return obs / np.tile(FRAME_SCALE, reps)


def reset(
    rng: np.random.Generator,
    cfg: DockingConfig,
    dr: DomainRandomization,
    vehicle: MassProperties | None = None,
    payload: PayloadSpec | None = None,
) -> tuple[BodyState, MassProperties, np.ndarray]:
    """Fresh episode for one vehicle; ``payload`` overrides DR sampling."""
    if vehicle is None:
        vehicle = VehicleConfig().mass_properties()
    state = BodyState.at_rest(sample_start_position(rng, cfg))
    if payload is None:
        payload = sample_payload(rng, dr)
    if cfg.attitude_jitter > 0:
        euler = rng.uniform(-cfg.attitude_jitter, cfg.attitude_jitter, size=3)
        state = BodyState(state.position, euler_to_quat(euler), state.lin_vel, state.ang_vel)
    props = compose_payload(vehicle, payload)
    frame = assemble_observation(state, np.zeros(NUM_THRUSTERS), cfg)
    return state, props, np.tile(frame, cfg.history_len)


def lane_rng(seed: int, lane: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(lane)]))


class DockingEnv:
    """Batch of independent docking lanes stepped together.

    Lanes auto-reset when they terminate; ``info["final_obs"]`` keeps the
    pre-reset observation of those lanes for value bootstrapping.
    """

    def __init__(
        self,
        cfg: DockingConfig,
        dr: DomainRandomization | None = None,
        vehicle: VehicleConfig | None = None,
        num_envs: int = 1,
        seed: int = 0,
        payload: PayloadSpec | None = None,
    ):
        cfg.validate()
        self.cfg = cfg
        self.dr = dr or DomainRandomization()
        self.dr.validate()
        vehicle = vehicle or VehicleConfig()
        self.base_props = vehicle.mass_properties()
        self.hydro = vehicle.hydro_params()
        self.layout = vehicle.thruster_layout()
        self.added = added_mass(self.hydro)
        self.damping = (self.hydro.lin_damping, self.hydro.quad_damping)
        self.payload = payload
        self.num_envs = num_envs
        self.rngs = [lane_rng(seed, i) for i in range(num_envs)]

        n, h = num_envs, cfg.history_len
        self.position = np.zeros((n, 3))
        self.attitude = np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))
        self.lin_vel = np.zeros((n, 3))
        self.ang_vel = np.zeros((n, 3))
        self.mass = np.full(n, self.base_props.mass)
        self.com = np.zeros((n, 3))
        self.inertia = np.zeros((n, 3, 3))
        self.volume = np.zeros(n)
        self.prev_action = np.zeros((n, NUM_THRUSTERS))
        self.history = np.zeros((n, h, FRAME_SIZE))
        self.steps = np.zeros(n, dtype=np.int64)
        self.episode_return = np.zeros(n)
        self.full_episode = np.ones(n, dtype=bool)

    @property
    def state(self) -> BodyState:
        return BodyState(self.position, self.attitude, self.lin_vel, self.ang_vel)

    @property
    def props(self) -> MassProperties:
        return MassProperties(self.mass, self.com, self.inertia, self.volume)

    @property
    def obs_dim(self) -> int:
        return self.cfg.obs_dim

    def observation(self) -> np.ndarray:
        return self.history.reshape(self.num_envs, -1).copy()

    def _reset_lanes(self, lanes) -> None:
        for i in lanes:
            state, props, obs = reset(self.rngs[i], self.cfg, self.dr, self.base_props, self.payload)
            self.position[i] = state.position
            self.attitude[i] = state.attitude
            self.lin_vel[i] = state.lin_vel
            self.ang_vel[i] = state.ang_vel
            self.mass[i] = props.mass
            self.com[i] = props.com_offset
            self.inertia[i] = props.inertia
            self.volume[i] = props.displaced_volume
            self.prev_action[i] = 0.0
            self.history[i] = obs.reshape(self.cfg.history_len, FRAME_SIZE)
            self.steps[i] = 0
            self.episode_return[i] = 0.0
            self.full_episode[i] = True

    def reset(self, stagger: bool = False) -> np.ndarray:
        """Reset every lane. ``stagger`` starts lanes at random step counts so
        episode boundaries spread over time; those first episodes are short and
        flagged as partial."""
        self._reset_lanes(range(self.num_envs))
        if stagger:
            for i, rng in enumerate(self.rngs):
                self.steps[i] = rng.integers(0, self.cfg.episode_len)
            self.full_episode[:] = self.steps == 0
        return self.observation()

    def external_wrench(self, cmd: np.ndarray) -> Wrench:
        """Thrust, restoring and disturbance wrench; drag is left to the integrator."""
        state, props = self.state, self.props
        wrench = body_wrench(cmd, self.layout) + restoring_wrench(state, props, self.hydro)
        dist = self.hydro.disturbance
        return Wrench(wrench.force + dist[:3], wrench.torque + dist[3:])

    def step(self, actions):
        cfg = self.cfg
        cmd = clamp_command(actions)
        # NaN commands would otherwise survive clipping
        cmd = np.where(np.isfinite(cmd), cmd, 0.0)
        with np.errstate(invalid="ignore", over="ignore"):
            new = integrate_step(
                self.state, self.external_wrench(cmd), self.props, cfg.dt,
                added_mass=self.added, damping=self.damping, check=False,
            )
            fault = ~new.is_finite()
            self.position, self.attitude, self.lin_vel, self.ang_vel = (
                new.position, new.attitude, new.lin_vel, new.ang_vel,
            )
            self.prev_action = cmd
            self.steps += 1
            pos_err = position_error(new, cfg)
            ang_err = angular_error(new, cfg)
            reward = cfg.reward_lambda1 * np.exp(-pos_err) + cfg.reward_lambda2 * np.exp(-ang_err)
            reward = np.where(fault, 0.0, reward)
            frame = assemble_observation(new, cmd, cfg)
        self.history = np.concatenate([self.history[:, 1:], frame[:, None, :]], axis=1)
        self.episode_return += reward

        truncated = (self.steps >= cfg.episode_len) & ~fault
        terminated = truncated | fault
        success = (pos_err < cfg.success_pos_err) & (ang_err < cfg.success_ang_err)
        info = {
            "pos_err": pos_err,
            "ang_err": ang_err,
            "success": success & ~fault,
            "fault": fault,
            "truncated": truncated,
            "episode_return": np.where(terminated, self.episode_return, np.nan),
            "episode_full": terminated & self.full_episode,
            "final_obs": None,
        }
        done = np.flatnonzero(terminated)
        if done.size:
            info["final_obs"] = self.observation()
            self._reset_lanes(done)
        return self.observation(), reward, terminated, info
