"""Infinite-horizon discrete LQR by Riccati value iteration."""
from dataclasses import dataclass

import numpy as np

from . import _kernels


class RiccatiError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class RiccatiSolution:
    p: np.ndarray
    k: np.ndarray
    residual: float
    iterations: int = 0


def riccati_step(p, a, b, q, r):
    pa = p @ a
    pb = p @ b
    return a.T @ pa + q - (a.T @ pb) @ np.linalg.solve(b.T @ pb + r, b.T @ pa)


def dare_residual(p, a, b, q, r):
    return float(np.linalg.norm(p - riccati_step(p, a, b, q, r)))


def lqr_gain(p, a, b, r):
    """Stabilizing gain for the policy du = k @ x (the minus sign lives in k)."""
    return -np.linalg.solve(b.T @ p @ b + r, b.T @ p @ a)


def solve_dare(model, q, r, tol=1e-12, max_iter=100_000):
    """Iterate the Riccati map from P = Q until successive iterates differ by < ``tol``."""
    a = np.ascontiguousarray(model.a, dtype=float)
    b = np.ascontiguousarray(model.b, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    r = np.ascontiguousarray(r, dtype=float)
    if np.min(np.linalg.eigvalsh(0.5 * (r + r.T))) <= 0:
        raise ValueError("R must be positive definite")
    p, iters, diff = _kernels.riccati_iterate(a, b, q, r, tol, max_iter)
    if not np.all(np.isfinite(p)):
        raise RiccatiError("Riccati iteration diverged; is (A, B) stabilizable?")
    residual = dare_residual(p, a, b, q, r)
    if diff >= tol:
        raise RiccatiError(
            f"Riccati iteration did not converge in {max_iter} iterations "
            f"(last step {diff:.3e}, residual {residual:.3e})", residual)
    return RiccatiSolution(p, lqr_gain(p, a, b, r), residual, iters)


def spectral_radius(m):
    return float(np.max(np.abs(np.linalg.eigvals(m))))
