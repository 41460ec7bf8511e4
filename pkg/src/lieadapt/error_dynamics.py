"""Tracking error on SE(3) and its linearization about a constant reference."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .rigid_body import generalized_inertia, twist_dynamics
from .se3 import BranchError, ad6, coad6, hat3, hat6, inverse


@dataclass(frozen=True)
class ErrorState:
    psi: np.ndarray
    dzeta: np.ndarray

    @property
    def x(self):
        return np.concatenate([self.psi, self.dzeta])


@dataclass(frozen=True)
class LinearModel:
    """Discrete error model x_{k+1} = a x_k + b du_k with forward-Euler step ``dt``."""

    a: np.ndarray
    b: np.ndarray
    dt: float


def error_state(s, ref_pose, ref_twist):
    ref_pose = np.asarray(ref_pose, dtype=float)
    psi, ok = _kernels.error_coords(
        np.ascontiguousarray(s.pose[:3, :3]), s.pose[:3, 3].copy(),
        np.ascontiguousarray(ref_pose[:3, :3]), ref_pose[:3, 3].copy())
    if not ok:
        raise BranchError("pose error rotation at or beyond pi - 1e-6")
    return ErrorState(psi, s.twist - np.asarray(ref_twist, dtype=float))


def nonlinear_error_rhs(s, ref, u, p):
    """Exact time derivative of (X_d^-1 X, zeta - zeta_d).

    ``ref`` is ``(ref_pose, ref_twist, ref_input)``. Returns the 4x4 rate of the
    group error and the 6-vector twist-error rate.
    """
    ref_pose, ref_twist, ref_input = ref
    psi_group = inverse(ref_pose) @ s.pose
    dpsi = psi_group @ hat6(s.twist) - hat6(ref_twist) @ psi_group
    ddzeta = twist_dynamics(s.twist, u, p) - twist_dynamics(ref_twist, ref_input, p)
    return dpsi, ddzeta


def gamma_matrix(zeta_d, p):
    """Jacobian of the twist dynamics with respect to the twist at ``zeta_d``."""
    zeta_d = np.asarray(zeta_d, dtype=float)
    j = generalized_inertia(p)
    jinv = np.linalg.inv(j)
    w_d, v_d = zeta_d[:3], zeta_d[3:]
    coupling = np.zeros((6, 6))
    coupling[:3, :3] = hat3(p.inertia @ w_d)
    coupling[:3, 3:] = p.mass * hat3(v_d)
    coupling[3:, :3] = p.mass * hat3(v_d)
    return jinv @ coad6(zeta_d) @ j + jinv @ coupling


def continuous_model(zeta_d, p):
    """Continuous pair (A_c, B_c) of the linear error dynamics."""
    a_c = np.zeros((12, 12))
    a_c[:6, :6] = -ad6(zeta_d)
    a_c[:6, 6:] = np.eye(6)
    a_c[6:, 6:] = gamma_matrix(zeta_d, p)
    b_c = np.zeros((12, 6))
    b_c[6:, :] = np.linalg.inv(generalized_inertia(p))
    return a_c, b_c


def linearize(zeta_d, p, dt):
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    a_c, b_c = continuous_model(zeta_d, p)
    return LinearModel(np.eye(12) + a_c * dt, b_c * dt, float(dt))


def controllability_matrix(model):
    blocks = [model.b]
    for _ in range(model.a.shape[0] - 1):
        blocks.append(model.a @ blocks[-1])
    return np.hstack(blocks)
