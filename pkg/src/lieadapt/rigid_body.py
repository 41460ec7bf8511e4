"""Rigid-body parameters, dynamics, integration and reference generation."""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .se3 import check_pose, coad6, exp_se3, make_pose

PAPER_MASS = 2.0
PAPER_INERTIA = np.array([[1.0, 0.2, 0.1], [0.2, 1.0, 0.2], [0.1, 0.2, 1.0]])
PAPER_OMEGA_D = np.array([0.0, 0.0, 1.0])
PAPER_VEL_D = np.array([2.0, 0.0, 0.2])

REFERENCE_MODES = ("exact", "paper")


@dataclass(frozen=True)
class InertialParams:
    mass: float
    inertia: np.ndarray
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        inertia = np.array(self.inertia, dtype=float)
        if inertia.shape != (3, 3):
            raise ValueError(f"inertia must be 3x3, got {inertia.shape}")
        if not np.isfinite(self.mass) or self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if np.max(np.abs(inertia - inertia.T)) > 1e-10:
            raise ValueError("inertia must be symmetric")
        if np.min(np.linalg.eigvalsh(inertia)) <= 0:
            raise ValueError("inertia must be positive definite")
        inertia.setflags(write=False)
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "inertia", inertia)

    def __eq__(self, other):
        if not isinstance(other, InertialParams):
            return NotImplemented
        return self.mass == other.mass and np.array_equal(self.inertia, other.inertia)

    @classmethod
    def paper(cls):
        return cls(PAPER_MASS, PAPER_INERTIA)


@dataclass(frozen=True)
class BodyState:
    pose: np.ndarray
    twist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pose", check_pose(np.array(self.pose, dtype=float)))
        twist = np.array(self.twist, dtype=float)
        if twist.shape != (6,):
            raise ValueError(f"twist must be a 6-vector, got {twist.shape}")
        object.__setattr__(self, "twist", twist)

    @classmethod
    def at(cls, pos=(0.0, 0.0, 0.0), rot=None, twist=np.zeros(6)):
        return cls(make_pose(rot, pos), twist)


@dataclass(frozen=True)
class PerturbationConfig:
    """Magnitudes for nominal-parameter draws.

    ``inertia_entry`` (g) bounds the uniform entries of G, ``inertia_scale``
    (s) multiplies G G^T, ``mass_range`` (delta) bounds the uniform mass offset.
    A ``None`` mass range means half the true mass.
    """

    inertia_entry: float = 0.3
    inertia_scale: float = 1.0
    mass_range: float = None

    def __post_init__(self):
        for name in ("inertia_entry", "inertia_scale", "mass_range"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")


def generalized_inertia(p):
    j = np.zeros((6, 6))
    j[:3, :3] = p.inertia
    j[3:, 3:] = p.mass * np.eye(3)
    return j


def twist_dynamics(zeta, u, p):
    """Body-frame twist rate J^-1 (coad(zeta) J zeta + u)."""
    j = generalized_inertia(p)
    return _kernels.twist_rate(np.asarray(zeta, dtype=float), np.asarray(u, dtype=float),
                               j, np.linalg.inv(j))


def feasible_reference_input(zeta_d, p, mode="exact"):
    """Feed-forward input for a constant reference twist.

    ``exact`` cancels the full Coriolis term so the reference is an equilibrium of
    the twist dynamics. ``paper`` applies only the linear-momentum cancellation
    ``(0, m w_d x v_d)``, which leaves the gyroscopic torque uncompensated.
    """
    zeta_d = np.asarray(zeta_d, dtype=float)
    if mode == "exact":
        return -coad6(zeta_d) @ (generalized_inertia(p) @ zeta_d)
    if mode == "paper":
        return np.concatenate([np.zeros(3), p.mass * np.cross(zeta_d[:3], zeta_d[3:])])
    raise ValueError(f"unknown reference mode {mode!r}; expected one of {REFERENCE_MODES}")


def step(s, u, p, dt):
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    j = generalized_inertia(p)
    rot, pos, zeta = _kernels.body_step(
        np.ascontiguousarray(s.pose[:3, :3]), s.pose[:3, 3].copy(), s.twist,
        np.asarray(u, dtype=float), j, np.linalg.inv(j), float(dt))
    return BodyState(make_pose(rot, pos), zeta)


def simulate(s, u, p, dt, n_steps):
    """Apply a constant input for ``n_steps`` steps; returns the final state."""
    for _ in range(n_steps):
        s = step(s, u, p, dt)
    return s


def reference_trajectory(zeta_d, u_d, dt, k):
    """Reference (pose, twist, input) at step ``k`` of a constant-twist reference from X_0 = I."""
    zeta_d = np.asarray(zeta_d, dtype=float)
    return exp_se3(k * dt * zeta_d), zeta_d.copy(), np.asarray(u_d, dtype=float).copy()


def perturb_params(p, cfg, seed):
    """Nominal parameters: p.mass + U(-delta, delta) and p.inertia + s G G^T.

    The mass is clamped from below at 0.1 * p.mass. Deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    g = rng.uniform(-cfg.inertia_entry, cfg.inertia_entry, size=(3, 3))
    delta = 0.5 * p.mass if cfg.mass_range is None else cfg.mass_range
    dm = rng.uniform(-delta, delta)
    d_inertia = cfg.inertia_scale * (g @ g.T)
    inertia = p.inertia + 0.5 * (d_inertia + d_inertia.T)
    return InertialParams(max(p.mass + dm, 0.1 * p.mass), inertia)
