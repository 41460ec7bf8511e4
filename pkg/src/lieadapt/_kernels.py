"""Hot numeric kernels.

Every function here is written against the numpy subset numba understands, so
the same source runs either jitted or as plain numpy (see ``_jit``). Poses are
passed as separate contiguous ``(R, p)`` arrays; twists are 6-vectors ordered
(omega, v). Kernels never raise; failures come back as status codes.
"""
import math

import numpy as np

from ._jit import kernel

SMALL_ANGLE = 1e-6
BRANCH_MARGIN = 1e-6

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_BRANCH = 2


@kernel
def hat3(w):
    m = np.zeros((3, 3))
    m[0, 1] = -w[2]
    m[0, 2] = w[1]
    m[1, 0] = w[2]
    m[1, 2] = -w[0]
    m[2, 0] = -w[1]
    m[2, 1] = w[0]
    return m


@kernel
def so3_coeffs(theta):
    """sin(t)/t, (1 - cos t)/t^2, (t - sin t)/t^3 with a Taylor branch near 0."""
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        return a, b, c
    s = math.sin(theta)
    h = math.sin(0.5 * theta)
    a = s / theta
    b = 2.0 * h * h / (theta * theta)
    c = (theta - s) / (theta * theta * theta)
    return a, b, c


@kernel
def exp_se3_parts(xi):
    w = xi[:3].copy()
    v = xi[3:].copy()
    theta = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    a, b, c = so3_coeffs(theta)
    wh = hat3(w)
    wh2 = wh @ wh
    eye = np.eye(3)
    rot = eye + a * wh + b * wh2
    vmat = eye + b * wh + c * wh2
    return rot, vmat @ v


@kernel
def log_so3(rot):
    """Rotation vector of ``rot`` and its angle, via atan2 for accuracy."""
    s_vec = np.empty(3)
    s_vec[0] = 0.5 * (rot[2, 1] - rot[1, 2])
    s_vec[1] = 0.5 * (rot[0, 2] - rot[2, 0])
    s_vec[2] = 0.5 * (rot[1, 0] - rot[0, 1])
    s = math.sqrt(s_vec[0] ** 2 + s_vec[1] ** 2 + s_vec[2] ** 2)
    c = 0.5 * (rot[0, 0] + rot[1, 1] + rot[2, 2] - 1.0)
    theta = math.atan2(s, c)
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        factor = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    elif s > 0.0:
        factor = theta / s
    else:
        # angle exactly pi: axis is not recoverable from the skew part
        factor = 0.0
    return factor * s_vec, theta


@kernel
def log_se3_parts(rot, pos):
    """Twist coordinates of (rot, pos) and a flag, False past the branch cut."""
    w, theta = log_so3(rot)
    ok = theta < math.pi - BRANCH_MARGIN
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    else:
        half = 0.5 * theta
        d = (1.0 - half * math.cos(half) / math.sin(half)) / (theta * theta)
    wh = hat3(w)
    vinv = np.eye(3) - 0.5 * wh + d * (wh @ wh)
    xi = np.empty(6)
    xi[:3] = w
    xi[3:] = vinv @ pos
    return xi, ok


@kernel
def ad6(xi):
    out = np.zeros((6, 6))
    wh = hat3(xi[:3])
    out[:3, :3] = wh
    out[3:, 3:] = wh
    out[3:, :3] = hat3(xi[3:])
    return out


@kernel
def coad6(xi):
    out = np.zeros((6, 6))
    wh = hat3(xi[:3])
    out[:3, :3] = -wh
    out[3:, 3:] = -wh
    out[:3, 3:] = -hat3(xi[3:])
    return out


@kernel
def twist_rate(zeta, u, jmat, jinv):
    return jinv @ (coad6(zeta) @ (jmat @ zeta) + u)


@kernel
def body_step(rot, pos, zeta, u, jmat, jinv, dt):
    """RK4 on the twist, exponential update of the pose with the stage-averaged twist."""
    k1 = twist_rate(zeta, u, jmat, jinv)
    z2 = zeta + 0.5 * dt * k1
    k2 = twist_rate(z2, u, jmat, jinv)
    z3 = zeta + 0.5 * dt * k2
    k3 = twist_rate(z3, u, jmat, jinv)
    z4 = zeta + dt * k3
    k4 = twist_rate(z4, u, jmat, jinv)
    zeta_new = zeta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    zmid = (zeta + 2.0 * z2 + 2.0 * z3 + z4) / 6.0
    drot, dpos = exp_se3_parts(dt * zmid)
    return rot @ drot, rot @ dpos + pos, zeta_new


@kernel
def error_coords(rot, pos, rot_d, pos_d):
    rdt = rot_d.T.copy()
    return log_se3_parts(rdt @ rot, rdt @ (pos - pos_d))


@kernel
def rollout_closed_loop(rot0, pos0, zeta0, zeta_d, u_d, gain, jmat, jinv, dt,
                        noise, div_limit):
    """Track exp(k dt zeta_d) with u = u_d + gain @ x + noise[k].

    Returns the recorded arrays, a status code and the failing step (or -1).
    Rows past a failure are left as NaN.
    """
    n = noise.shape[0]
    rots = np.full((n + 1, 3, 3), np.nan)
    poss = np.full((n + 1, 3), np.nan)
    zetas = np.full((n + 1, 6), np.nan)
    ref_rots = np.full((n + 1, 3, 3), np.nan)
    ref_poss = np.full((n + 1, 3), np.nan)
    xs = np.full((n + 1, 12), np.nan)
    dus = np.full((n, 6), np.nan)
    rot = rot0.copy()
    pos = pos0.copy()
    zeta = zeta0.copy()
    x = np.empty(12)
    for k in range(n + 1):
        rot_d, pos_d = exp_se3_parts((k * dt) * zeta_d)
        rots[k] = rot
        poss[k] = pos
        zetas[k] = zeta
        ref_rots[k] = rot_d
        ref_poss[k] = pos_d
        psi, ok = error_coords(rot, pos, rot_d, pos_d)
        if not ok:
            return rots, poss, zetas, ref_rots, ref_poss, xs, dus, STATUS_BRANCH, k
        x[:6] = psi
        x[6:] = zeta - zeta_d
        xs[k] = x
        if math.sqrt(np.sum(x * x)) > div_limit:
            return rots, poss, zetas, ref_rots, ref_poss, xs, dus, STATUS_DIVERGED, k
        if k == n:
            break
        du = gain @ x + noise[k]
        dus[k] = du
        rot, pos, zeta = body_step(rot, pos, zeta, u_d + du, jmat, jinv, dt)
    return rots, poss, zetas, ref_rots, ref_poss, xs, dus, STATUS_OK, -1


@kernel
def rollout_linear(a, b, x0, gain, noise, div_limit):
    n = noise.shape[0]
    xs = np.full((n + 1, a.shape[0]), np.nan)
    dus = np.full((n, b.shape[1]), np.nan)
    x = x0.copy()
    for k in range(n + 1):
        xs[k] = x
        if math.sqrt(np.sum(x * x)) > div_limit:
            return xs, dus, STATUS_DIVERGED, k
        if k == n:
            break
        du = gain @ x + noise[k]
        dus[k] = du
        x = a @ x + b @ du
    return xs, dus, STATUS_OK, -1


@kernel
def riccati_iterate(a, b, q, r, tol, max_iter):
    """Value iteration P <- A'PA + Q - A'PB (B'PB + R)^-1 B'PA from P = Q."""
    p = q.copy()
    at = a.T.copy()
    bt = b.T.copy()
    diff = np.inf
    for i in range(max_iter):
        pa = p @ a
        pb = p @ b
        gain_rhs = np.linalg.solve(bt @ pb + r, bt @ pa)
        p_new = at @ pa + q - (at @ pb) @ gain_rhs
        p_new = 0.5 * (p_new + p_new.T)
        diff = math.sqrt(np.sum((p_new - p) ** 2))
        p = p_new
        if diff < tol:
            return p, i + 1, diff
    return p, max_iter, diff
