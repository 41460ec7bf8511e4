"""Monte Carlo sweep over dataset sizes and its CSV outputs."""
import csv
import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adaptive import evaluate_tracking, fig1_initial_state, run_algorithm1
from .rigid_body import InertialParams, PerturbationConfig, perturb_params
from .sysid import reconstruction_errors

log = logging.getLogger(__name__)

PAPER_GRID = tuple(range(200, 2001, 200))
SWEEP_COLUMNS = ("N", "trial", "e_Ib", "e_m", "id_time_s", "e_p", "e_R", "e_w", "e_v")
AGGREGATE_COLUMNS = ("N", "mean_e_Ib", "std_e_Ib", "mean_e_m", "std_e_m", "mean_time_s")
ERROR_COLUMNS = ("e_Ib", "e_m", "id_time_s", "e_p", "e_R", "e_w", "e_v")
NOMINAL_TAG = 0
TIMING_REPEATS = 5


def cell_seed(base, trial, n):
    """base XOR a stable 64-bit hash of (trial, n). ``n = 0`` tags the nominal draw."""
    digest = hashlib.blake2b(f"{trial}:{n}".encode(), digest_size=8).digest()
    return (int(base) ^ int.from_bytes(digest, "little")) & 0xFFFF_FFFF_FFFF_FFFF


@dataclass(frozen=True)
class SweepRow:
    N: int
    trial: int
    e_Ib: float
    e_m: float
    id_time_s: float
    e_p: float
    e_R: float
    e_w: float
    e_v: float
    collect_time_s: float = 0.0


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def n_cells(self):
        return len(self.rows) + len(self.failures)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def _run_cell(args):
    trial, n, cfg, true_params, nominal, horizon_steps, seed = args
    try:
        run = run_algorithm1(true_params, nominal, cfg.replace(n_samples=n, seed=seed),
                             timing_repeats=TIMING_REPEATS)
        e_ib, e_m = reconstruction_errors(run.params, true_params)
        metrics = evaluate_tracking(run.params, true_params, horizon_steps,
                                    fig1_initial_state(), cfg)
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        return trial, n, None, f"{type(exc).__name__}: {exc}"
    row = SweepRow(n, trial, e_ib, e_m, run.id_time_s, metrics.e_p, metrics.e_R,
                   metrics.e_w, metrics.e_v, run.collect_time_s)
    return trial, n, row, None


def monte_carlo_sweep(n_trials, n_grid, cfg, base_seed=0, true_params=None,
                      perturbation=PerturbationConfig(), horizon_steps=1000, jobs=1):
    """Run the adaptive loop for every (trial, N) cell.

    Each trial draws one nominal parameter set; each cell reuses it with its own
    seed. Output order is (trial, N) regardless of ``jobs``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if any(int(n) < 18 for n in n_grid):
        raise ValueError("every dataset size must be >= 18")
    true_params = true_params or InertialParams.paper()
    cells = []
    for trial in range(n_trials):
        nominal = perturb_params(true_params, perturbation, cell_seed(base_seed, trial, NOMINAL_TAG))
        for n in n_grid:
            cells.append((trial, int(n), cfg, true_params, nominal, horizon_steps,
                          cell_seed(base_seed, trial, int(n))))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    out = SweepResult()
    for trial, n, row, reason in sorted(results, key=lambda r: (r[0], r[1])):
        if row is None:
            log.warning("cell trial=%d N=%d failed: %s", trial, n, reason)
            out.failures.append((trial, n, reason))
        else:
            out.rows.append(row)
    return out


def aggregate(sr):
    """Per-N mean and (population) standard deviation of every error column."""
    stats = {}
    ns = np.array([r.N for r in sr.rows])
    for n in sorted(set(ns.tolist())):
        mask = ns == n
        entry = {"count": int(mask.sum())}
        for name in ERROR_COLUMNS:
            col = sr.column(name)[mask]
            entry[f"mean_{name}"] = float(col.mean())
            entry[f"std_{name}"] = float(col.std())
        stats[n] = entry
    return stats


def _fmt(v):
    return str(v) if isinstance(v, (int, np.integer)) else f"{v:.17g}"


def write_sweep_csv(sr, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in sr.rows:
            w.writerow([_fmt(getattr(r, c)) for c in SWEEP_COLUMNS])


def write_aggregate_csv(stats, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATE_COLUMNS)
        for n, e in stats.items():
            w.writerow([_fmt(n)] + [_fmt(e[c]) for c in AGGREGATE_COLUMNS[1:-1]]
                       + [_fmt(e["mean_id_time_s"])])


def write_failures_csv(sr, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("trial", "N", "reason"))
        w.writerows(sr.failures)


def read_sweep_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [SweepRow(int(d["N"]), int(d["trial"]),
                         *(float(d[c]) for c in SWEEP_COLUMNS[2:])) for d in reader]
    return SweepResult(rows)


def linear_fit_r2(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    return float(slope), float(intercept), float(1.0 - np.sum(resid ** 2) / ss_tot)


def default_jobs():
    return os.cpu_count() or 1
