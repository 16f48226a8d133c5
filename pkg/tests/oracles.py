"""Independent reference computations used by the tests.

Nothing here imports the code paths it is used to check.
"""
import numpy as np


def point_cloud_properties(masses, points):
    """Mass, centre of mass and origin inertia of a set of point masses."""
    masses = np.asarray(masses, dtype=float)
    points = np.asarray(points, dtype=float)
    total = masses.sum()
    com = (masses[:, None] * points).sum(axis=0) / total
    inertia = np.zeros((3, 3))
    for m, r in zip(masses, points):
        inertia += m * (np.dot(r, r) * np.eye(3) - np.outer(r, r))
    return total, com, inertia


def diagonal_inertia_cloud(mass, diag, radius=1.0):
    """Point masses with COM at the origin realising diag(a, b, c) about it.

    Pairs of points at +-radius on each axis carry k_i = 2 m_i r^2 with
    a = k_y + k_z etc.; any leftover mass sits at the origin.
    """
    a, b, c = diag
    k = np.array([(b + c - a) / 2, (a + c - b) / 2, (a + b - c) / 2])
    assert np.all(k >= 0), "diag must satisfy the triangle inequality"
    pair_mass = k / (2 * radius**2)
    masses, points = [], []
    for axis in range(3):
        for sign in (1.0, -1.0):
            p = np.zeros(3)
            p[axis] = sign * radius
            masses.append(pair_mass[axis])
            points.append(p)
    centre = mass - 2 * pair_mass.sum()
    assert centre >= 0, "radius too small for this mass"
    masses.append(centre)
    points.append(np.zeros(3))
    return np.array(masses), np.array(points)


def wrench_by_summation(cmd, positions, axes, max_speed, coeff):
    force = np.zeros(3)
    torque = np.zeros(3)
    for i in range(8):
        c = min(max(float(cmd[i]), -1.0), 1.0)
        omega = c * max_speed[i]
        f = coeff[i] * omega * abs(omega)
        fv = [f * axes[i][0], f * axes[i][1], f * axes[i][2]]
        r = positions[i]
        force += fv
        torque += [r[1] * fv[2] - r[2] * fv[1], r[2] * fv[0] - r[0] * fv[2], r[0] * fv[1] - r[1] * fv[0]]
    return force, torque


def gae_brute_force(rewards, values, dones, last_value, gamma, lam):
    """Advantages from the explicit double sum over n-step TD errors."""
    T = len(rewards)
    next_values = list(values[1:]) + [last_value]
    deltas = [rewards[t] + gamma * next_values[t] * (1 - dones[t]) - values[t] for t in range(T)]
    adv = np.zeros(T)
    for t in range(T):
        total, weight = 0.0, 1.0
        for k in range(t, T):
            total += weight * deltas[k]
            if dones[k]:
                break
            weight *= gamma * lam
        adv[t] = total
    return adv, adv + np.asarray(values)


def mlp_reference(weights, biases, x):
    """Row-by-row tanh MLP with a linear output layer, plain Python loops."""
    out = []
    for row in np.atleast_2d(x):
        h = list(row)
        for li, (W, b) in enumerate(zip(weights, biases)):
            z = [sum(h[i] * W[i][j] for i in range(len(h))) + b[j] for j in range(len(b))]
            h = [np.tanh(v) for v in z] if li < len(weights) - 1 else z
        out.append(h)
    return np.array(out)


def central_difference(f, x, eps=1e-5):
    grad = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += eps
        xm[i] -= eps
        grad[i] = (f(xp) - f(xm)) / (2 * eps)
    return grad


def random_quaternions(rng, n):
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)
