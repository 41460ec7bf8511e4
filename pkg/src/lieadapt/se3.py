"""SO(3)/SE(3) group and algebra operations.

Poses are 4x4 homogeneous numpy arrays. Twists are 6-vectors ordered
``(omega, v)``, and every 6x6 operator below uses that block order.
"""
import numpy as np

from . import _kernels

SKEW_TOL = 1e-9
ORTHO_TOL = 1e-9


class BranchError(ValueError):
    """Rotation angle too close to pi for a unique logarithm."""


def hat3(w):
    """Cross-product matrix: ``hat3(w) @ u == np.cross(w, u)``."""
    return _kernels.hat3(np.asarray(w, dtype=float))


def vee3(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if np.linalg.norm(m + m.T) > SKEW_TOL:
        raise ValueError("matrix is not skew-symmetric")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def hat6(xi):
    xi = np.asarray(xi, dtype=float)
    out = np.zeros((4, 4))
    out[:3, :3] = hat3(xi[:3])
    out[:3, 3] = xi[3:]
    return out


def vee6(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if np.any(m[3] != 0.0):
        raise ValueError("bottom row of an se(3) element must be zero")
    return np.concatenate([vee3(m[:3, :3]), m[:3, 3]])


def make_pose(rot=None, pos=None):
    out = np.eye(4)
    if rot is not None:
        out[:3, :3] = rot
    if pos is not None:
        out[:3, 3] = pos
    return out


def check_rotation(rot, tol=ORTHO_TOL):
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3):
        raise ValueError(f"expected a 3x3 rotation, got shape {rot.shape}")
    if np.linalg.norm(rot.T @ rot - np.eye(3)) > tol:
        raise ValueError("rotation is not orthonormal")
    if abs(np.linalg.det(rot) - 1.0) > tol:
        raise ValueError("rotation determinant is not +1")
    return rot


def check_pose(x, tol=ORTHO_TOL):
    x = np.asarray(x, dtype=float)
    if x.shape != (4, 4):
        raise ValueError(f"expected a 4x4 pose, got shape {x.shape}")
    if np.any(x[3] != (0.0, 0.0, 0.0, 1.0)):
        raise ValueError("pose bottom row must be (0, 0, 0, 1)")
    check_rotation(x[:3, :3], tol)
    return x


def exp_se3(xi):
    """Closed-form exponential (Rodrigues rotation and left-Jacobian translation)."""
    rot, pos = _kernels.exp_se3_parts(np.asarray(xi, dtype=float))
    return make_pose(rot, pos)


def log_se3(x):
    """Principal logarithm as twist coordinates.

    Raises BranchError when the rotation angle is within 1e-6 of pi.
    """
    x = np.asarray(x, dtype=float)
    xi, ok = _kernels.log_se3_parts(np.ascontiguousarray(x[:3, :3]), x[:3, 3].copy())
    if not ok:
        raise BranchError("rotation angle at or beyond pi - 1e-6; logarithm is ambiguous")
    return xi


def compose(x, y):
    return np.asarray(x, dtype=float) @ np.asarray(y, dtype=float)


def inverse(x):
    x = np.asarray(x, dtype=float)
    rt = x[:3, :3].T
    return make_pose(rt, -rt @ x[:3, 3])


def ad6(xi):
    """Matrix of the bracket: ``ad6(xi) @ eta == vee6([hat6(xi), hat6(eta)])``."""
    return _kernels.ad6(np.asarray(xi, dtype=float))


def coad6(zeta):
    """Coadjoint ``-[[w^, v^], [0, w^]]``, which equals ``ad6(zeta).T``."""
    return _kernels.coad6(np.asarray(zeta, dtype=float))
