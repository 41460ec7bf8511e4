"""Ridge least-squares identification of the discrete error model and recovery of (I_b, m)."""
import csv
from dataclasses import dataclass

import numpy as np

from .rigid_body import InertialParams

N_STATE = 12
N_INPUT = 6
CSV_HEADER = ([f"x{i}" for i in range(N_STATE)] + [f"u{i}" for i in range(N_INPUT)]
              + [f"xp{i}" for i in range(N_STATE)])
EIG_FLOOR = 1e-6


class ExcitationError(ValueError):
    """Regression data is not persistently exciting."""


@dataclass(frozen=True)
class IdDataset:
    x_minus: np.ndarray
    u_mat: np.ndarray
    x_plus: np.ndarray

    def __post_init__(self):
        n = self.x_minus.shape[0]
        if n < 1 or self.u_mat.shape[0] != n or self.x_plus.shape[0] != n:
            raise ValueError("dataset blocks must share a nonzero row count")

    def __len__(self):
        return self.x_minus.shape[0]

    def regressor(self):
        return np.hstack([self.x_minus, self.u_mat])

    def gram(self):
        z = self.regressor()
        return z.T @ z

    def to_csv(self, path):
        rows = np.hstack([self.x_minus, self.u_mat, self.x_plus])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for row in rows:
                w.writerow([f"{v:.17g}" for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"unexpected dataset header in {path}")
            rows = np.array([[float(v) for v in row] for row in reader], dtype=float)
        rows = rows.reshape(-1, len(CSV_HEADER))
        return cls(rows[:, :N_STATE], rows[:, N_STATE:N_STATE + N_INPUT], rows[:, N_STATE + N_INPUT:])


@dataclass(frozen=True)
class IdentifiedModel:
    a_hat: np.ndarray
    b_hat: np.ndarray
    lam: float


def assemble_dataset(states, inputs):
    """Stack N+1 states and N inputs into row-aligned (X-, U, X+)."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if states.shape[0] != inputs.shape[0] + 1:
        raise ValueError(f"need N+1 states for N inputs, got {states.shape[0]} states "
                         f"and {inputs.shape[0]} inputs")
    return IdDataset(states[:-1].copy(), inputs.copy(), states[1:].copy())


def excitation_condition(d):
    """Condition number of the unregularized Gram matrix [X U]^T [X U]."""
    return float(np.linalg.cond(d.gram()))


def fit_linear_model(d, lam=1e-6):
    """Solve ([X U]^T [X U] + lam I) [A^T; B^T] = [X U]^T X+."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    z = d.regressor()
    gram = z.T @ z + lam * np.eye(z.shape[1])
    rhs = z.T @ d.x_plus
    if lam == 0 and np.linalg.cond(gram) > 1e12:
        raise ExcitationError("Gram matrix is singular; use lambda > 0 or richer excitation")
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise ExcitationError("normal equations are singular; use lambda > 0") from exc
    n = d.x_minus.shape[1]
    return IdentifiedModel(coef[:n].T.copy(), coef[n:].T.copy(), float(lam))


def reconstruct_params(m, dt):
    """Recover (I_b, m) from the lower 6x6 block of B_hat, which estimates J_b^-1 dt.

    The inertia block is symmetrized and its eigenvalues clamped at 1e-6; a clamp
    is recorded as ``meta['clamped'] = True`` on the result.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    lower = m.b_hat[N_INPUT:, :] / dt
    if not np.all(np.isfinite(lower)) or np.linalg.cond(lower) > 1e12:
        raise ExcitationError("identified input block is singular; cannot recover J_b")
    j_hat = np.linalg.inv(lower)
    mass = np.trace(j_hat[3:, 3:]) / 3.0
    sym = 0.5 * (j_hat[:3, :3] + j_hat[:3, :3].T)
    evals, evecs = np.linalg.eigh(sym)
    clamped = bool(np.any(evals < EIG_FLOOR))
    inertia = sym
    if clamped:
        inertia = (evecs * np.maximum(evals, EIG_FLOOR)) @ evecs.T
        inertia = 0.5 * (inertia + inertia.T)
    if mass <= 0:
        raise ValueError(f"recovered mass is not positive ({mass:.3g})")
    return InertialParams(mass, inertia, meta={"clamped": clamped})


def reconstruction_errors(est, truth):
    """(Frobenius inertia error, absolute mass error)."""
    return (float(np.linalg.norm(est.inertia - truth.inertia)), abs(est.mass - truth.mass))
