"""Thruster chain: normalized command -> rotor speed -> thrust -> body wrench.

Rotor speed follows the command instantly (zero-order model) and thrust uses
the steady-state Yoerger law F = C_T * omega * |omega|. Normalized commands in
[-1, 1] map to PWM as ``1500 + 400 * cmd`` microseconds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rigidbody import Wrench

NUM_THRUSTERS = 8
PWM_NEUTRAL = 1500.0
PWM_SPAN = 400.0


@dataclass(frozen=True)
class ThrusterLayout:
    positions: np.ndarray  # (8, 3) body frame, m
    axes: np.ndarray  # (8, 3) unit thrust directions
    max_rotor_speed: np.ndarray  # (8,) rad/s
    thrust_coeff: np.ndarray  # (8,) N s^2 / rad^2, forward
    reverse_thrust_coeff: np.ndarray | None = None  # defaults to thrust_coeff

    def __post_init__(self):
        for name in ("positions", "axes"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for name in ("max_rotor_speed", "thrust_coeff"):
            value = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (NUM_THRUSTERS,)).copy()
            object.__setattr__(self, name, value)
        rev = self.thrust_coeff if self.reverse_thrust_coeff is None else self.reverse_thrust_coeff
        object.__setattr__(
            self, "reverse_thrust_coeff", np.broadcast_to(np.asarray(rev, dtype=float), (NUM_THRUSTERS,)).copy()
        )
        if self.positions.shape != (NUM_THRUSTERS, 3) or self.axes.shape != (NUM_THRUSTERS, 3):
            raise ValueError("layout needs exactly 8 thrusters")
        if not np.allclose(np.linalg.norm(self.axes, axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("thruster axes must be unit vectors")
        if np.linalg.matrix_rank(self.allocation_matrix()) != 6:
            raise ValueError("thruster layout does not span all 6 degrees of freedom")

    def allocation_matrix(self) -> np.ndarray:
        """6x8 map from per-thruster force to body wrench."""
        return np.vstack([self.axes.T, np.cross(self.positions, self.axes).T])


def bluerov2_heavy_layout(max_thrust: float = 35.0, max_rotor_speed: float = 400.0) -> ThrusterLayout:
    """Vectored 8-thruster layout: 4 horizontal at 45 deg, 4 vertical."""
    c = np.sqrt(0.5)
    positions = [
        (0.156, -0.111, 0.0),
        (0.156, 0.111, 0.0),
        (-0.156, -0.111, 0.0),
        (-0.156, 0.111, 0.0),
        (0.120, -0.218, 0.0),
        (0.120, 0.218, 0.0),
        (-0.120, -0.218, 0.0),
        (-0.120, 0.218, 0.0),
    ]
    axes = [
        (c, c, 0.0),
        (c, -c, 0.0),
        (c, -c, 0.0),
        (c, c, 0.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 1.0),
    ]
    return ThrusterLayout(
        positions=positions,
        axes=axes,
        max_rotor_speed=max_rotor_speed,
        thrust_coeff=max_thrust / max_rotor_speed**2,
    )


def clamp_command(cmd) -> np.ndarray:
    return np.clip(np.asarray(cmd, dtype=float), -1.0, 1.0)


def command_to_pwm(cmd) -> np.ndarray:
    return PWM_NEUTRAL + PWM_SPAN * clamp_command(cmd)


def pwm_to_command(pwm) -> np.ndarray:
    return clamp_command((np.asarray(pwm, dtype=float) - PWM_NEUTRAL) / PWM_SPAN)


def command_to_rotor_speed(cmd, layout: ThrusterLayout) -> np.ndarray:
    return clamp_command(cmd) * layout.max_rotor_speed


def rotor_force(omega, thrust_coeff, reverse_thrust_coeff=None):
    omega = np.asarray(omega, dtype=float)
    coeff = np.asarray(thrust_coeff, dtype=float)
    if reverse_thrust_coeff is not None:
        coeff = np.where(omega < 0, reverse_thrust_coeff, coeff)
    return coeff * omega * np.abs(omega)


def thruster_forces(cmd, layout: ThrusterLayout) -> np.ndarray:
    omega = command_to_rotor_speed(cmd, layout)
    return rotor_force(omega, layout.thrust_coeff, layout.reverse_thrust_coeff)


def body_wrench(cmd, layout: ThrusterLayout) -> Wrench:
    tau = thruster_forces(cmd, layout) @ layout.allocation_matrix().T
    return Wrench(tau[..., :3], tau[..., 3:])
