"""Data-driven adaptation loop: excite, collect, fit, reconstruct, re-solve the gain."""
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import _kernels
from .error_dynamics import linearize
from .lqr import solve_dare
from .rigid_body import (PAPER_OMEGA_D, PAPER_VEL_D, BodyState, feasible_reference_input,
                         generalized_inertia)
from .se3 import BranchError
from .sysid import (ExcitationError, assemble_dataset, fit_linear_model,
                    reconstruct_params)

DIVERGENCE_LIMIT = 1e3
PLANTS = ("nonlinear", "linear")
FEEDFORWARDS = ("controller", "true")


class DivergenceError(RuntimeError):
    def __init__(self, step):
        super().__init__(f"closed-loop rollout diverged at step {step} (|x| > {DIVERGENCE_LIMIT:g})")
        self.step = step


def _paper_twist():
    return np.concatenate([PAPER_OMEGA_D, PAPER_VEL_D])


@dataclass(frozen=True)
class AdaptiveConfig:
    n_samples: int = 1500
    noise_std: np.ndarray = field(default_factory=lambda: np.full(6, 0.1))
    lam: float = 1e-6
    dt: float = 0.01
    q: np.ndarray = field(default_factory=lambda: np.eye(12))
    r: np.ndarray = field(default_factory=lambda: 1e-2 * np.eye(6))
    seed: int = 0
    zeta_d: np.ndarray = field(default_factory=_paper_twist)
    ref_mode: str = "exact"
    plant: str = "nonlinear"
    feedforward: str = "controller"

    def __post_init__(self):
        noise = np.broadcast_to(np.asarray(self.noise_std, dtype=float), (6,)).copy()
        object.__setattr__(self, "noise_std", noise)
        for name in ("q", "r", "zeta_d"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        if self.n_samples < 18:
            raise ValueError(f"n_samples must be >= 18, got {self.n_samples}")
        if np.any(noise < 0):
            raise ValueError("noise_std entries must be >= 0")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.q.shape != (12, 12) or self.r.shape != (6, 6):
            raise ValueError("q must be 12x12 and r must be 6x6")
        if self.zeta_d.shape != (6,):
            raise ValueError("zeta_d must be a 6-vector")
        if self.feedforward not in FEEDFORWARDS:
            raise ValueError(f"feedforward must be one of {FEEDFORWARDS}, got {self.feedforward!r}")
        if self.plant not in PLANTS:
            raise ValueError(f"plant must be one of {PLANTS}, got {self.plant!r}")

    def replace(self, **changes):
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return AdaptiveConfig(**kw)


@dataclass(frozen=True)
class TrackingMetrics:
    e_p: float
    e_R: float
    e_w: float
    e_v: float

    def as_dict(self):
        return {"e_p": self.e_p, "e_R": self.e_R, "e_w": self.e_w, "e_v": self.e_v}


@dataclass(frozen=True)
class Rollout:
    t: np.ndarray
    rot: np.ndarray
    pos: np.ndarray
    twist: np.ndarray
    ref_rot: np.ndarray
    ref_pos: np.ndarray
    ref_twist: np.ndarray
    x: np.ndarray
    du: np.ndarray


@dataclass(frozen=True)
class AdaptiveRun:
    params: object
    model: object
    dataset: object
    gain0: np.ndarray
    gain: np.ndarray
    id_time_s: float
    collect_time_s: float


def controller_gain(params, cfg):
    return solve_dare(linearize(cfg.zeta_d, params, cfg.dt), cfg.q, cfg.r).k


def feedforward_input(controller_params, true_params, cfg):
    """Reference input the controller applies; ``cfg.feedforward`` picks whose parameters."""
    params = controller_params if cfg.feedforward == "controller" else true_params
    return feasible_reference_input(cfg.zeta_d, params, cfg.ref_mode)


def closed_loop_rollout(true_params, gain, u_ff, x0, n_steps, cfg, noise=None):
    """Nonlinear plant under u = u_ff + gain @ x (+ noise); ``du`` excludes ``u_ff``."""
    if noise is None:
        noise = np.zeros((n_steps, 6))
    j = generalized_inertia(true_params)
    out = _kernels.rollout_closed_loop(
        np.ascontiguousarray(x0.pose[:3, :3]), x0.pose[:3, 3].copy(), x0.twist.copy(),
        cfg.zeta_d, np.asarray(u_ff, dtype=float), np.ascontiguousarray(gain), j, np.linalg.inv(j), float(cfg.dt),
        np.ascontiguousarray(noise, dtype=float), DIVERGENCE_LIMIT)
    rots, poss, zetas, ref_rots, ref_poss, xs, dus, status, fail = out
    if status == _kernels.STATUS_DIVERGED:
        raise DivergenceError(fail)
    if status == _kernels.STATUS_BRANCH:
        raise BranchError(f"pose error reached the logarithm branch cut at step {fail}")
    t = np.arange(n_steps + 1) * cfg.dt
    ref_twist = np.broadcast_to(cfg.zeta_d, zetas.shape).copy()
    return Rollout(t, rots, poss, zetas, ref_rots, ref_poss, ref_twist, xs, dus)


def _linear_rollout(true_params, gain, x0_vec, n_steps, cfg, noise):
    model = linearize(cfg.zeta_d, true_params, cfg.dt)
    xs, dus, status, fail = _kernels.rollout_linear(
        model.a, model.b, x0_vec, np.ascontiguousarray(gain), noise, DIVERGENCE_LIMIT)
    if status == _kernels.STATUS_DIVERGED:
        raise DivergenceError(fail)
    return xs, dus


def identify(dataset, lam, dt, repeats=1):
    """Fit and reconstruct; returns (model, params, seconds), the time being the best of ``repeats``."""
    best = np.inf
    for _ in range(max(repeats, 1)):
        t0 = time.perf_counter()
        model = fit_linear_model(dataset, lam)
        params = reconstruct_params(model, dt)
        best = min(best, time.perf_counter() - t0)
    return model, params, best


def run_algorithm1(true_params, nominal_params, cfg, x0=None, timing_repeats=1):
    """One pass of the adaptive loop.

    Solves the LQR gain from the nominal model, drives the true plant for
    ``cfg.n_samples`` steps with Gaussian exploration noise, fits (A, B) by ridge
    regression on (x, du) and reconstructs (I_b, m) from B. ``x0`` is the initial
    body state (default: on the reference) or, for the linear plant, a 12-vector.
    """
    gain0 = controller_gain(nominal_params, cfg)
    rng = np.random.default_rng(cfg.seed)
    noise = rng.normal(0.0, 1.0, size=(cfg.n_samples, 6)) * cfg.noise_std

    t0 = time.perf_counter()
    if cfg.plant == "linear":
        x0_vec = np.zeros(12) if x0 is None else np.asarray(x0, dtype=float)
        xs, dus = _linear_rollout(true_params, gain0, x0_vec, cfg.n_samples, cfg, noise)
    else:
        if x0 is None:
            x0 = BodyState(np.eye(4), cfg.zeta_d)
        u_ff = feedforward_input(nominal_params, true_params, cfg)
        roll = closed_loop_rollout(true_params, gain0, u_ff, x0, cfg.n_samples, cfg, noise)
        xs, dus = roll.x, roll.du
    dataset = assemble_dataset(xs, dus)
    collect_time = time.perf_counter() - t0

    if np.linalg.matrix_rank(dataset.regressor()) < dataset.regressor().shape[1]:
        raise ExcitationError(
            "regression data is rank deficient (persistence of excitation violated); "
            "increase the exploration noise or start away from the reference")

    model, params, id_time = identify(dataset, cfg.lam, cfg.dt, timing_repeats)

    gain = controller_gain(params, cfg)
    return AdaptiveRun(params, model, dataset, gain0, gain, id_time, collect_time)


def tracking_metrics(roll):
    """Time averages of position, rotation-angle, angular and linear velocity errors."""
    e_p = np.linalg.norm(roll.pos - roll.ref_pos, axis=1)
    e_R = np.linalg.norm(roll.x[:, :3], axis=1)
    e_w = np.linalg.norm(roll.twist[:, :3] - roll.ref_twist[:, :3], axis=1)
    e_v = np.linalg.norm(roll.twist[:, 3:] - roll.ref_twist[:, 3:], axis=1)
    return TrackingMetrics(float(e_p.mean()), float(e_R.mean()), float(e_w.mean()),
                           float(e_v.mean()))


def tracking_rollout(params_for_controller, true_params, horizon_steps, x0, cfg):
    """``horizon_steps`` samples starting at ``x0`` (k = 0 .. horizon - 1), no exploration."""
    gain = controller_gain(params_for_controller, cfg)
    u_ff = feedforward_input(params_for_controller, true_params, cfg)
    return closed_loop_rollout(true_params, gain, u_ff, x0, max(horizon_steps - 1, 0), cfg)


def evaluate_tracking(params_for_controller, true_params, horizon_steps, x0, cfg):
    if horizon_steps < 1:
        raise ValueError(f"horizon must be >= 1 step, got {horizon_steps}")
    return tracking_metrics(
        tracking_rollout(params_for_controller, true_params, horizon_steps, x0, cfg))


def fig1_initial_state(zeta_0=np.zeros(6)):
    return BodyState.at(pos=(0.4, 0.0, 0.0), twist=zeta_0)
