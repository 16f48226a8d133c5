"""Inertial-box hydrodynamics: added mass, damping, gravity and buoyancy.

The hull is replaced by an equivalent box of side lengths ``box_dims``.
Added mass uses the strip-style box formula

    translational  m_i = c_t * rho * A_i ** 1.5,   A_i = d_j * d_k
    rotational     J_i = c_r * rho * d_i * (d_j**4 + d_k**4)

where (i, j, k) cycles over the body axes and ``(c_t, c_r)`` are
``added_mass_coeffs``. The rotational term shares its geometric factor with
the angular quadratic-drag term of MuJoCo's inertia-box fluid model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rigidbody import BodyState, MassProperties, Wrench, cross, rotate_inverse

GRAVITY = 9.81


def _vec(values, n):
    return field(default_factory=lambda: np.array(values, dtype=float).reshape(n))


@dataclass(frozen=True)
class HydroParams:
    box_dims: np.ndarray = _vec([0.457, 0.575, 0.254], 3)
    fluid_density: float = 1000.0
    lin_damping: np.ndarray = _vec([4.0, 6.0, 8.0, 0.5, 0.5, 0.5], 6)
    quad_damping: np.ndarray = _vec([95.0, 150.0, 150.0, 2.0, 2.0, 2.0], 6)
    cob_offset: np.ndarray = _vec([0.0, 0.0, 0.02], 3)
    added_mass_coeffs: tuple[float, float] = (0.1, 1.0 / 256.0)
    disturbance: np.ndarray = _vec([0.0] * 6, 6)
    gravity: float = GRAVITY

    def __post_init__(self):
        for name in ("box_dims", "lin_damping", "quad_damping", "cob_offset", "disturbance"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.box_dims <= 0):
            raise ValueError("box_dims must be strictly positive")
        if self.fluid_density < 0:
            raise ValueError("fluid_density must be non-negative")
        if np.any(self.lin_damping < 0) or np.any(self.quad_damping < 0):
            raise ValueError("damping coefficients must be non-negative")


def added_mass(params: HydroParams) -> np.ndarray:
    """Diagonal added mass (3 translational, 3 rotational)."""
    d = params.box_dims
    rho = params.fluid_density
    c_t, c_r = params.added_mass_coeffs
    j = np.roll(d, -1)
    k = np.roll(d, -2)
    translational = c_t * rho * (j * k) ** 1.5
    rotational = c_r * rho * d * (j**4 + k**4)
    return np.concatenate([translational, rotational])


def damping_wrench(state: BodyState, params: HydroParams) -> Wrench:
    v = np.concatenate([rotate_inverse(state.attitude, state.lin_vel), state.ang_vel], axis=-1)
    tau = -(params.lin_damping * v + params.quad_damping * v * np.abs(v))
    return Wrench(tau[..., :3], tau[..., 3:])


def restoring_wrench(state: BodyState, props: MassProperties, params: HydroParams) -> Wrench:
    """Weight at the centre of mass plus buoyancy at the centre of buoyancy."""
    up = rotate_inverse(state.attitude, np.broadcast_to([0.0, 0.0, 1.0], state.attitude.shape[:-1] + (3,)))
    g = params.gravity
    weight = -(np.asarray(props.mass, dtype=float) * g)[..., None] * up
    buoyancy = (params.fluid_density * g * np.asarray(props.displaced_volume, dtype=float))[..., None] * up
    torque = cross(props.com_offset, weight) + cross(params.cob_offset, buoyancy)
    return Wrench(weight + buoyancy, torque)
