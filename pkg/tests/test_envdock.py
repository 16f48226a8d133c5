import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from auvdock.envdock import (
    FRAME_SIZE,
    DockingConfig,
    DockingEnv,
    DomainRandomization,
    assemble_observation,
    compute_reward,
    reset,
    sample_payload,
    start_region,
)
from auvdock.rigidbody import BodyState, euler_to_quat
from auvdock.vehicle import VehicleConfig

LARGE_DR = DomainRandomization(enabled=True, mass_upper=5.0, spawn_radius=0.3)


def _at(position, euler=(0.0, 0.0, 0.0)):
    return BodyState(np.asarray(position, float), euler_to_quat(np.asarray(euler, float)), np.zeros(3), np.zeros(3))


# --- payload sampling


def test_disabled_dr_gives_zero_payload(rng):
    p = sample_payload(rng, DomainRandomization(enabled=False, mass_upper=5.0, spawn_radius=0.3))
    assert p.mass == 0.0
    np.testing.assert_array_equal(p.offset, np.zeros(3))


def test_large_dr_bounds(rng):
    for _ in range(2000):
        p = sample_payload(rng, LARGE_DR)
        assert 0.0 <= p.mass <= 5.0
        assert abs(np.linalg.norm(p.offset) - 0.3) < 1e-9


def test_ball_mode_stays_inside(rng):
    dr = DomainRandomization(enabled=True, mass_upper=1.0, spawn_radius=0.3, offset_mode="ball")
    radii = np.array([np.linalg.norm(sample_payload(rng, dr).offset) for _ in range(4000)])
    assert radii.max() <= 0.3
    # uniform in the ball: P(r < R/2) = 1/8
    assert abs(np.mean(radii < 0.15) - 0.125) < 0.02


def test_bad_dr_rejected():
    with pytest.raises(ValueError):
        DomainRandomization(mass_upper=-1.0).validate()
    with pytest.raises(ValueError):
        DomainRandomization(offset_mode="shell").validate()


# --- reset


def test_reset_inside_start_cube(rng):
    cfg = DockingConfig()
    center, frame = start_region(cfg)
    for _ in range(10_000 // 20):
        state, _, _ = reset(rng, cfg, DomainRandomization())
        local = frame @ (state.position - center)
        assert np.all(np.abs(local) <= 1.0)
        # never behind the open face plane (the dock is at +x of the opening)
        assert state.position[0] < cfg.dock_position[0] - cfg.dock_inner_size / 2
    # the near face of the cube sits one dock length clear of the opening
    assert center[0] + 1.0 == pytest.approx(-0.35 - 0.7)


def test_reset_many_inside_cube():
    cfg = DockingConfig(dock_position=[1.0, -2.0, 0.5], dock_opening_axis=[0.0, 1.0, 0.0])
    center, frame = start_region(cfg)
    rng = np.random.default_rng(3)
    pos = np.array([reset(rng, cfg, DomainRandomization())[0].position for _ in range(10_000)])
    local = (pos - center) @ frame.T
    assert np.all(np.abs(local) <= 1.0)
    assert np.all((pos - cfg.dock_position) @ np.array([0.0, 1.0, 0.0]) < -0.35)


def test_reset_state_and_history(rng):
    cfg = DockingConfig(history_len=3)
    state, props, obs = reset(rng, cfg, DomainRandomization())
    assert obs.shape == (63,)
    frames = obs.reshape(3, FRAME_SIZE)
    np.testing.assert_array_equal(frames[0], frames[1])
    np.testing.assert_array_equal(frames[1], frames[2])
    np.testing.assert_array_equal(state.attitude, [1, 0, 0, 0])
    np.testing.assert_array_equal(state.lin_vel, 0)
    np.testing.assert_array_equal(frames[0, 13:], 0)
    base = VehicleConfig().mass_properties()
    assert props.mass == base.mass
    np.testing.assert_array_equal(props.inertia, base.inertia)


def test_reset_composes_sampled_payload(rng):
    _, props, _ = reset(rng, DockingConfig(), LARGE_DR)
    assert props.mass > 11.5
    assert np.linalg.norm(props.com_offset) > 0


# --- reward


def test_reward_examples():
    cfg = DockingConfig()
    assert compute_reward(_at([0, 0, 0]), cfg) == pytest.approx(0.23, abs=1e-15)
    assert compute_reward(_at([-1, 0, 0]), cfg) == pytest.approx(0.2 * np.exp(-1) + 0.03, abs=1e-15)
    assert compute_reward(_at([-1, 0, 0]), cfg) == pytest.approx(0.10358, abs=1e-5)
    far = compute_reward(_at([-1e6, 0, 0]), cfg)
    assert far > 0.0 and far == pytest.approx(0.03)


def test_reward_wraps_angles():
    cfg = DockingConfig()
    # yaw of +pi and -pi are the same orientation and the same reward
    a = compute_reward(_at([0.3, 0, 0], (0, 0, np.pi - 1e-12)), cfg)
    b = compute_reward(_at([0.3, 0, 0], (0, 0, -np.pi + 1e-12)), cfg)
    assert a == pytest.approx(b, abs=1e-10)


vec3 = st.lists(st.floats(-20, 20), min_size=3, max_size=3)
angles = st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3)


@given(vec3, angles)
def test_reward_bounds(pos, euler):
    r = compute_reward(_at(pos, euler), DockingConfig())
    assert 0.0 < r <= 0.23


@given(st.floats(0, 10), st.floats(0, 10), angles)
def test_reward_monotone_in_distance(d1, d2, euler):
    cfg = DockingConfig()
    lo, hi = sorted([d1, d2])
    assert compute_reward(_at([-lo, 0, 0], euler), cfg) >= compute_reward(_at([-hi, 0, 0], euler), cfg)


@given(st.floats(0, 1.5), st.floats(0, 1.5), vec3)
def test_reward_monotone_in_angle(a1, a2, pos):
    cfg = DockingConfig()
    lo, hi = sorted([a1, a2])
    assert compute_reward(_at(pos, (0, 0, lo)), cfg) >= compute_reward(_at(pos, (0, 0, hi)), cfg)


# --- observations


def test_observation_at_dock():
    frame = assemble_observation(_at([0, 0, 0]), np.zeros(8), DockingConfig())
    expected = np.zeros(21)
    expected[3] = 1.0
    np.testing.assert_array_equal(frame, expected)


def test_observation_sign_convention():
    frame = assemble_observation(_at([-2, 0, 0]), np.zeros(8), DockingConfig())
    np.testing.assert_array_equal(frame[:3], [2, 0, 0])


@given(vec3, angles, st.lists(st.floats(-1, 1), min_size=8, max_size=8))
def test_observation_length_and_canonical_quaternion(pos, euler, prev):
    q = -euler_to_quat(np.asarray(euler))
    state = BodyState(np.asarray(pos, float), q, np.ones(3), np.ones(3))
    frame = assemble_observation(state, prev, DockingConfig())
    assert frame.shape == (21,)
    assert frame[3] >= 0
    np.testing.assert_array_equal(frame[13:], prev)


def test_history_semantics():
    h = 4
    env = DockingEnv(DockingConfig(history_len=h), num_envs=1, seed=1)
    obs = env.reset().reshape(h, FRAME_SIZE)
    initial = obs[0].copy()
    frames = []
    rng = np.random.default_rng(0)
    for k in range(1, 7):
        obs, *_ = env.step(rng.uniform(-1, 1, (1, 8)))
        obs = obs.reshape(h, FRAME_SIZE)
        frames.append(obs[-1].copy())
        if k < h:
            for j in range(h - k):
                np.testing.assert_array_equal(obs[j], initial)
            np.testing.assert_array_equal(obs[h - k :], np.array(frames))
        else:
            np.testing.assert_array_equal(obs, np.array(frames[-h:]))


def test_prev_action_clamped_in_observation():
    env = DockingEnv(DockingConfig(), num_envs=1)
    env.reset()
    obs, *_ = env.step(np.array([[3.0, -2.0, 0.5, 0, 0, 0, 0, 0]]))
    np.testing.assert_array_equal(obs[0, 13:16], [1.0, -1.0, 0.5])


# --- stepping


def test_equilibrium_with_zero_command():
    env = DockingEnv(DockingConfig(), num_envs=4, seed=2)
    env.reset()
    start = env.position.copy()
    for _ in range(10):
        env.step(np.zeros((4, 8)))
    assert np.max(np.abs(env.position - start)) < 1e-6


def test_full_surge_closes_distance():
    env = DockingEnv(DockingConfig(), num_envs=8, seed=3)
    env.reset()
    surge = np.array([[1, 1, 1, 1, 0, 0, 0, 0]] * 8, dtype=float)
    _, _, _, info = env.step(surge)
    last = info["pos_err"]
    # the cube extends 1 m sideways; stay within the window where x dominates
    for _ in range(5):
        _, _, _, info = env.step(surge)
        assert np.all(info["pos_err"] < last)
        last = info["pos_err"]


def test_surge_matches_single_axis_model():
    # at small t the body frame matches the world frame and drag is negligible
    env = DockingEnv(DockingConfig(), num_envs=1, seed=4)
    env.reset()
    x0 = env.position[0, 0]
    env.step(np.array([[1, 1, 1, 1, 0, 0, 0, 0]], dtype=float))
    thrust = 4 * 35.0 * np.sqrt(0.5)
    m_eff = 11.5 + env.added[0]
    dt = 0.05
    # implicit linear drag: v = dt F / (m + dt d_lin)
    v = dt * thrust / (m_eff + dt * 4.0)
    assert env.lin_vel[0, 0] == pytest.approx(v, rel=1e-9)
    assert env.position[0, 0] - x0 == pytest.approx(dt * v, rel=1e-9)


def test_horizon_termination_and_autoreset():
    cfg = DockingConfig(episode_len=7)
    env = DockingEnv(cfg, num_envs=3, seed=5)
    env.reset()
    for k in range(1, 8):
        _, _, term, info = env.step(np.zeros((3, 8)))
        assert term.all() == (k == 7)
    assert info["truncated"].all()
    assert info["episode_full"].all()
    assert info["final_obs"] is not None
    np.testing.assert_array_equal(env.steps, 0)


def test_fault_terminates_with_zero_reward():
    env = DockingEnv(DockingConfig(), num_envs=2, seed=6)
    env.reset()
    env.lin_vel[1] = np.nan
    _, reward, term, info = env.step(np.zeros((2, 8)))
    assert reward[1] == 0.0 and term[1] and info["fault"][1]
    assert not term[0] and not info["fault"][0]
    assert np.isfinite(env.position).all()


def test_nan_command_is_ignored():
    env = DockingEnv(DockingConfig(), num_envs=1, seed=6)
    env.reset()
    _, _, term, info = env.step(np.full((1, 8), np.nan))
    assert not term[0] and not info["fault"][0]


def test_success_flag():
    env = DockingEnv(DockingConfig(), num_envs=1)
    env.reset()
    env.position[0] = [0.05, 0.0, 0.0]
    _, _, _, info = env.step(np.zeros((1, 8)))
    assert info["success"][0]


def test_stagger_marks_partial_episodes():
    env = DockingEnv(DockingConfig(episode_len=50), num_envs=16, seed=7)
    env.reset(stagger=True)
    assert np.all((env.steps >= 0) & (env.steps < 50))
    np.testing.assert_array_equal(env.full_episode, env.steps == 0)


def _trajectory(seed):
    env = DockingEnv(DockingConfig(episode_len=30), LARGE_DR, num_envs=5, seed=seed)
    obs = [env.reset()]
    rng = np.random.default_rng(9)
    for _ in range(60):
        o, r, *_ = env.step(rng.uniform(-1, 1, (5, 8)))
        obs.extend([o, r])
    return obs


def test_determinism():
    a, b = _trajectory(11), _trajectory(11)
    for x, y in zip(a, b):
        assert x.tobytes() == y.tobytes()
    assert any(x.tobytes() != y.tobytes() for x, y in zip(a, _trajectory(12)))


def test_lanes_independent_of_batch_size():
    small = DockingEnv(DockingConfig(), LARGE_DR, num_envs=2, seed=13)
    big = DockingEnv(DockingConfig(), LARGE_DR, num_envs=6, seed=13)
    np.testing.assert_array_equal(small.reset(), big.reset()[:2])
    np.testing.assert_array_equal(small.mass, big.mass[:2])


def test_invalid_config():
    with pytest.raises(ValueError):
        DockingEnv(DockingConfig(history_len=0))
    with pytest.raises(ValueError):
        DockingEnv(DockingConfig(dock_opening_axis=[1.0, 1.0, 0.0]))
