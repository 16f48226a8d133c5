"""Quaternion rigid-body state, payload composition and fixed-step integration.

Conventions: world frame is x forward, y left, z up (gravity along -z).
Quaternions are (w, x, y, z) and rotate body vectors into the world frame.
Every array function broadcasts over leading batch dimensions, so the same
code steps a single vehicle or a whole batch of environment lanes.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

GIMBAL_EPS = 1e-6


class NonFiniteStateError(FloatingPointError):
    """Raised when integration produces NaN or Inf."""


@dataclass(frozen=True)
class BodyState:
    position: np.ndarray  # (..., 3) world, m
    attitude: np.ndarray  # (..., 4) unit quaternion, body->world
    lin_vel: np.ndarray  # (..., 3) world, m/s
    ang_vel: np.ndarray  # (..., 3) body, rad/s

    @classmethod
    def at_rest(cls, position=(0.0, 0.0, 0.0)) -> "BodyState":
        position = np.asarray(position, dtype=float)
        batch = position.shape[:-1]
        attitude = np.zeros(batch + (4,))
        attitude[..., 0] = 1.0
        return cls(position.copy(), attitude, np.zeros_like(position), np.zeros_like(position))

    def is_finite(self) -> np.ndarray:
        return (
            np.isfinite(self.position).all(-1)
            & np.isfinite(self.attitude).all(-1)
            & np.isfinite(self.lin_vel).all(-1)
            & np.isfinite(self.ang_vel).all(-1)
        )


@dataclass(frozen=True)
class MassProperties:
    mass: float | np.ndarray
    com_offset: np.ndarray  # (..., 3) body frame
    inertia: np.ndarray  # (..., 3, 3) about the body origin
    displaced_volume: float | np.ndarray = 0.0

    def validate(self) -> None:
        mass = np.asarray(self.mass)
        inertia = np.asarray(self.inertia)
        if np.any(mass <= 0):
            raise ValueError("mass must be positive")
        if not np.allclose(inertia, np.swapaxes(inertia, -1, -2), rtol=0.0, atol=1e-12):
            raise ValueError("inertia tensor must be symmetric")
        if np.any(np.linalg.eigvalsh(inertia) <= 0):
            raise ValueError("inertia tensor must be positive definite")
        if np.any(np.asarray(self.displaced_volume) < 0):
            raise ValueError("displaced volume must be non-negative")


@dataclass(frozen=True)
class PayloadSpec:
    mass: float = 0.0
    offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if np.any(np.asarray(self.mass) < 0):
            raise ValueError("payload mass must be non-negative")
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray  # (..., 3) body frame, N
    torque: np.ndarray  # (..., 3) body frame about origin, N*m

    @classmethod
    def zero(cls, batch=()) -> "Wrench":
        return cls(np.zeros(tuple(batch) + (3,)), np.zeros(tuple(batch) + (3,)))

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.force + other.force, self.torque + other.torque)

    def __neg__(self) -> "Wrench":
        return Wrench(-self.force, -self.torque)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque], axis=-1)


# ---------------------------------------------------------------------------
# quaternion helpers


# Hamilton product as a constant bilinear form: (p q)_i = sum_jk H_ijk p_j q_k
_HAMILTON = np.zeros((4, 4, 4))
for _i, _terms in enumerate(
    [
        [(0, 0, 1), (1, 1, -1), (2, 2, -1), (3, 3, -1)],
        [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, -1)],
        [(0, 2, 1), (1, 3, -1), (2, 0, 1), (3, 1, 1)],
        [(0, 3, 1), (1, 2, 1), (2, 1, -1), (3, 0, 1)],
    ]
):
    for _j, _k, _sign in _terms:
        _HAMILTON[_i, _j, _k] = _sign


def quat_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    if p.ndim == 1 and q.ndim == 1:
        return np.einsum("ijk,j,k->i", _HAMILTON, p, q)
    pw, px, py, pz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = np.moveaxis(q, -1, 0)
    rot = np.empty(q.shape[:-1] + (3, 3))
    rot[..., 0, 0] = 1 - 2 * (y * y + z * z)
    rot[..., 0, 1] = 2 * (x * y - w * z)
    rot[..., 0, 2] = 2 * (x * z + w * y)
    rot[..., 1, 0] = 2 * (x * y + w * z)
    rot[..., 1, 1] = 1 - 2 * (x * x + z * z)
    rot[..., 1, 2] = 2 * (y * z - w * x)
    rot[..., 2, 0] = 2 * (x * z - w * y)
    rot[..., 2, 1] = 2 * (y * z + w * x)
    rot[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return rot


def quat_exp(rotvec: np.ndarray) -> np.ndarray:
    """Unit quaternion for a rotation vector (axis * angle)."""
    angle = np.linalg.norm(rotvec, axis=-1, keepdims=True)
    half = 0.5 * angle
    # sin(half)/angle, with the series limit 1/2 near zero
    small = angle < 1e-8
    safe = np.where(small, 1.0, angle)
    scale = np.where(small, 0.5 - angle**2 / 48.0, np.sin(half) / safe)
    return np.concatenate([np.cos(half), rotvec * scale], axis=-1)


def _rotate(w, u, v):
    # v + 2w (u x v) + 2 u x (u x v), the unit-quaternion sandwich product
    t = 2.0 * cross(u, v)
    return v + w * t + cross(u, t)


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Body-frame vector to world frame."""
    return _rotate(q[..., :1], q[..., 1:], np.asarray(v, dtype=float))


def rotate_inverse(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """World-frame vector to body frame."""
    return _rotate(q[..., :1], -q[..., 1:], np.asarray(v, dtype=float))


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2 * np.pi)


def quat_to_euler(q: np.ndarray) -> np.ndarray:
    """ZYX intrinsic (roll, pitch, yaw) angles of a unit quaternion.

    In the gimbal-lock band |pitch| > pi/2 - 1e-6 roll is set to 0 and the
    whole heading is attributed to yaw.
    """
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    r20 = 2 * (x * z - w * y)
    r21 = 2 * (y * z + w * x)
    r22 = 1 - 2 * (x * x + y * y)
    r10 = 2 * (x * y + w * z)
    r00 = 1 - 2 * (y * y + z * z)
    r01 = 2 * (x * y - w * z)
    r11 = 1 - 2 * (x * x + z * z)

    pitch = np.arctan2(-r20, np.hypot(r21, r22))
    roll = np.arctan2(r21, r22)
    yaw = np.arctan2(r10, r00)
    locked = np.abs(pitch) > np.pi / 2 - GIMBAL_EPS
    roll = np.where(locked, 0.0, roll)
    yaw = np.where(locked, np.arctan2(-r01, r11), yaw)
    return wrap_angle(np.stack([roll, pitch, yaw], axis=-1))


def euler_to_quat(euler: np.ndarray) -> np.ndarray:
    roll, pitch, yaw = np.moveaxis(np.asarray(euler, dtype=float), -1, 0)
    cr, sr = np.cos(roll / 2), np.sin(roll / 2)
    cp, sp = np.cos(pitch / 2), np.sin(pitch / 2)
    cy, sy = np.cos(yaw / 2), np.sin(yaw / 2)
    return np.stack(
        [
            cr * cp * cy + sr * sp * sy,
            sr * cp * cy - cr * sp * sy,
            cr * sp * cy + sr * cp * sy,
            cr * cp * sy - sr * sp * cy,
        ],
        axis=-1,
    )


def euler_rates(q: np.ndarray, ang_vel_body: np.ndarray) -> np.ndarray:
    """ZYX Euler-angle rates for body angular velocity (cos(pitch) floored at 1e-6)."""
    roll, pitch, _ = np.moveaxis(quat_to_euler(q), -1, 0)
    p, qr, r = np.moveaxis(ang_vel_body, -1, 0)
    cphi, sphi = np.cos(roll), np.sin(roll)
    cth = np.maximum(np.cos(pitch), GIMBAL_EPS)
    sth = np.sin(pitch)
    a = qr * sphi + r * cphi
    return np.stack([p + a * sth / cth, qr * cphi - r * sphi, a / cth], axis=-1)


_CYC1 = np.array([1, 2, 0])
_CYC2 = np.array([2, 0, 1])
_LEVI_CIVITA = np.zeros((3, 3, 3))
_LEVI_CIVITA[[0, 1, 2], [1, 2, 0], [2, 0, 1]] = 1.0
_LEVI_CIVITA[[0, 1, 2], [2, 0, 1], [1, 2, 0]] = -1.0


def cross(a, b) -> np.ndarray:
    """Broadcasting 3-vector cross product; much cheaper than np.cross on small inputs.

    Single vectors go through one einsum call (lowest call overhead), batches
    through index permutation. Both give bit-identical results.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1 and b.ndim == 1:
        return np.einsum("ijk,j,k->i", _LEVI_CIVITA, a, b)
    return a[..., _CYC1] * b[..., _CYC2] - a[..., _CYC2] * b[..., _CYC1]


def skew(v: np.ndarray) -> np.ndarray:
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


# ---------------------------------------------------------------------------
# mass properties


def point_mass_inertia(mass, offset: np.ndarray) -> np.ndarray:
    """Inertia of a point mass about the origin: m (|r|^2 I - r r^T)."""
    offset = np.asarray(offset, dtype=float)
    r2 = np.sum(offset * offset, axis=-1)[..., None, None]
    outer = offset[..., :, None] * offset[..., None, :]
    return np.asarray(mass)[..., None, None] * (r2 * np.eye(3) - outer)


def compose_payload(vehicle: MassProperties, payload: PayloadSpec) -> MassProperties:
    """Rigidly attach a point-mass payload to the vehicle.

    Buoyancy is unchanged: the payload is treated as dense enough that its
    own displaced volume is negligible.
    """
    if np.all(np.asarray(payload.mass) == 0):
        return vehicle
    m_v = np.asarray(vehicle.mass, dtype=float)
    m_p = np.asarray(payload.mass, dtype=float)
    total = m_v + m_p
    com = (m_v[..., None] * vehicle.com_offset + m_p[..., None] * payload.offset) / total[..., None]
    inertia = vehicle.inertia + point_mass_inertia(m_p, payload.offset)
    return replace(vehicle, mass=total if total.ndim else float(total), com_offset=com, inertia=inertia)


def generalized_mass(props: MassProperties, added_mass=None) -> np.ndarray:
    """6x6 body-origin mass matrix, with optional diagonal added mass."""
    mass = np.asarray(props.mass, dtype=float)
    com = np.asarray(props.com_offset, dtype=float)
    batch = np.broadcast_shapes(mass.shape, com.shape[:-1], np.shape(props.inertia)[:-2])
    mat = np.zeros(batch + (6, 6))
    m = mass[..., None, None]
    mat[..., :3, :3] = m * np.eye(3)
    mc = m * skew(com)
    mat[..., :3, 3:] = -mc
    mat[..., 3:, :3] = mc
    mat[..., 3:, 3:] = props.inertia
    if added_mass is not None:
        idx = np.arange(6)
        mat[..., idx, idx] += np.asarray(added_mass, dtype=float)
    return mat


def kinetic_energy(state: BodyState, props: MassProperties, added_mass=None) -> np.ndarray:
    nu = np.concatenate([rotate_inverse(state.attitude, state.lin_vel), state.ang_vel], axis=-1)
    mat = generalized_mass(props, added_mass)
    return 0.5 * np.einsum("...i,...ij,...j->...", nu, mat, nu)


# ---------------------------------------------------------------------------
# integration


def body_accelerations(
    v_body: np.ndarray,
    omega: np.ndarray,
    wrench: Wrench,
    props: MassProperties,
    mass_matrix_inv: np.ndarray,
) -> np.ndarray:
    """Newton-Euler about the body origin; returns d/dt of (v_body, omega)."""
    m = np.asarray(props.mass, dtype=float)[..., None]
    com = props.com_offset
    w_x_v = cross(omega, v_body)
    bias_f = m * (w_x_v + cross(omega, cross(omega, com)))
    i_omega = np.einsum("...ij,...j->...i", props.inertia, omega)
    bias_t = cross(omega, i_omega) + m * cross(com, w_x_v)
    rhs = np.concatenate([wrench.force - bias_f, wrench.torque - bias_t], axis=-1)
    return np.einsum("...ij,...j->...i", mass_matrix_inv, rhs)


def integrate_step(
    state: BodyState,
    wrench: Wrench,
    props: MassProperties,
    dt: float,
    added_mass=None,
    damping=None,
    mass_matrix_inv: np.ndarray | None = None,
    check: bool = True,
) -> BodyState:
    """Advance one semi-implicit Euler step.

    Velocities are updated from the body-frame Newton-Euler equations first;
    the new velocities then drive the pose. The attitude is advanced by the
    exponential map of omega*dt and renormalized.

    ``damping`` is an optional ``(linear, quadratic)`` pair of 6-vectors for
    per-axis drag -(l*v + q*v*|v|). It is applied linearly-implicitly, i.e.
    with (M + dt*J) in place of M where J = diag(l + 2q|v|) is the drag
    Jacobian, which keeps stiff quadratic drag stable at coarse dt. Without
    it the step is fully explicit and ``mass_matrix_inv`` may be passed to
    skip the 6x6 inversion.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    v_body = rotate_inverse(state.attitude, state.lin_vel)
    if damping is None:
        if mass_matrix_inv is None:
            mass_matrix_inv = np.linalg.inv(generalized_mass(props, added_mass))
        acc = body_accelerations(v_body, state.ang_vel, wrench, props, mass_matrix_inv)
    else:
        lin, quad = (np.asarray(c, dtype=float) for c in damping)
        nu = np.concatenate([v_body, state.ang_vel], axis=-1)
        drag = -(lin * nu + quad * nu * np.abs(nu))
        wrench = Wrench(wrench.force + drag[..., :3], wrench.torque + drag[..., 3:])
        mat = generalized_mass(props, added_mass)
        jac = lin + 2.0 * quad * np.abs(nu)
        idx = np.arange(6)
        mat = np.broadcast_to(mat, nu.shape[:-1] + (6, 6)).copy()
        mat[..., idx, idx] += dt * jac
        acc = body_accelerations(v_body, state.ang_vel, wrench, props, np.linalg.inv(mat))
    v_body = v_body + dt * acc[..., :3]
    omega = state.ang_vel + dt * acc[..., 3:]

    attitude = quat_multiply(state.attitude, quat_exp(omega * dt))
    attitude = attitude / np.linalg.norm(attitude, axis=-1, keepdims=True)
    lin_vel = rotate(attitude, v_body)
    position = state.position + dt * lin_vel
    new = BodyState(position, attitude, lin_vel, omega)
    if check and not np.all(new.is_finite()):
        raise NonFiniteStateError("integration produced a non-finite state")
    return new
