"""TOML run configuration with defaults for the constant-twist tracking scenario."""
import copy
import re
from dataclasses import dataclass

import numpy as np
import tomli
import tomli_w

from .adaptive import FEEDFORWARDS, PLANTS, AdaptiveConfig
from .experiments import PAPER_GRID, default_jobs
from .rigid_body import (PAPER_INERTIA, PAPER_MASS, PAPER_OMEGA_D, PAPER_VEL_D, REFERENCE_MODES,
                         BodyState, InertialParams, PerturbationConfig)

DEFAULTS = {
    "run": {"seed": 0, "out_dir": "out", "jobs": 0},
    "plant": {"mass": PAPER_MASS, "inertia": PAPER_INERTIA.tolist()},
    "reference": {"omega": PAPER_OMEGA_D.tolist(), "vel": PAPER_VEL_D.tolist(), "mode": "exact"},
    "perturbation": {"inertia_entry": 0.3, "inertia_scale": 1.0, "mass_range": 0.5 * PAPER_MASS},
    "adaptive": {
        "n_samples": 1500,
        "noise_std": [0.1] * 6,
        "lam": 1e-6,
        "dt": 0.01,
        "q": [1.0] * 12,
        "r": [1e-2] * 6,
        "feedforward": "controller",
        "plant": "nonlinear",
    },
    "simulation": {"horizon_s": 10.0, "initial_position": [0.4, 0.0, 0.0],
                   "initial_twist": [0.0] * 6},
    "sweep": {"n_trials": 50, "grid": list(PAPER_GRID)},
}


class ConfigError(ValueError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.line = line


def _find_line(text, section, key):
    current = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"^{re.escape(key)}\s*=", line):
            return i
    return None


def _merge(base, override, path, text):
    out = copy.deepcopy(base)
    for section, values in override.items():
        if section not in base:
            raise ConfigError(f"unknown section [{section}]", path, _find_line(text, section, ""))
        if not isinstance(values, dict):
            raise ConfigError(f"[{section}] must be a table", path)
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError(f"unknown key {section}.{key}", path,
                                  _find_line(text, section, key))
            out[section][key] = value
    return out


def _matrix(value, n, name):
    arr = np.asarray(value, dtype=float)
    if arr.shape == (n,):
        return np.diag(arr)
    if arr.shape == (n, n):
        return arr
    raise ValueError(f"{name} must be a length-{n} diagonal or an {n}x{n} matrix")


@dataclass
class RunConfig:
    raw: dict
    true_params: InertialParams
    perturbation: PerturbationConfig
    adaptive: AdaptiveConfig
    horizon_steps: int
    x0: BodyState
    n_trials: int
    grid: tuple
    seed: int
    out_dir: str
    jobs: int

    def dump(self, path):
        with open(path, "wb") as fh:
            tomli_w.dump(self.raw, fh)


def _build(raw, path, text):
    def fail(section, key, msg):
        raise ConfigError(f"{section}.{key}: {msg}", path, _find_line(text, section, key))

    def get(section, key, conv):
        try:
            return conv(raw[section][key])
        except (TypeError, ValueError) as exc:
            fail(section, key, str(exc))

    plant = raw["plant"]
    try:
        true_params = InertialParams(float(plant["mass"]), np.asarray(plant["inertia"], dtype=float))
    except (TypeError, ValueError) as exc:
        key = "mass" if "mass" in str(exc) else "inertia"
        fail("plant", key, str(exc))

    mode = raw["reference"]["mode"]
    if mode not in REFERENCE_MODES:
        fail("reference", "mode", f"expected one of {REFERENCE_MODES}, got {mode!r}")
    omega = get("reference", "omega", lambda v: np.asarray(v, dtype=float).reshape(3))
    vel = get("reference", "vel", lambda v: np.asarray(v, dtype=float).reshape(3))

    pert = raw["perturbation"]
    for key in ("inertia_entry", "inertia_scale", "mass_range"):
        value = get("perturbation", key, float)
        if value < 0:
            fail("perturbation", key, "must be >= 0")
    perturbation = PerturbationConfig(float(pert["inertia_entry"]), float(pert["inertia_scale"]),
                                      float(pert["mass_range"]))

    ad = raw["adaptive"]
    n_samples = get("adaptive", "n_samples", int)
    if n_samples < 18:
        fail("adaptive", "n_samples", "must be >= 18")
    noise = get("adaptive", "noise_std", lambda v: np.broadcast_to(np.asarray(v, dtype=float), (6,)))
    if np.any(noise < 0):
        fail("adaptive", "noise_std", "entries must be >= 0")
    lam = get("adaptive", "lam", float)
    if lam < 0:
        fail("adaptive", "lam", "must be >= 0")
    dt = get("adaptive", "dt", float)
    if dt <= 0:
        fail("adaptive", "dt", "must be positive")
    q = get("adaptive", "q", lambda v: _matrix(v, 12, "q"))
    if np.min(np.linalg.eigvalsh(0.5 * (q + q.T))) < -1e-12:
        fail("adaptive", "q", "must be positive semidefinite")
    r = get("adaptive", "r", lambda v: _matrix(v, 6, "r"))
    if np.min(np.linalg.eigvalsh(0.5 * (r + r.T))) <= 0:
        fail("adaptive", "r", "must be positive definite")
    if ad["feedforward"] not in FEEDFORWARDS:
        fail("adaptive", "feedforward", f"expected one of {FEEDFORWARDS}")
    if ad["plant"] not in PLANTS:
        fail("adaptive", "plant", f"expected one of {PLANTS}")

    seed = get("run", "seed", int)
    if seed < 0:
        fail("run", "seed", "must be a non-negative integer")
    cfg = AdaptiveConfig(n_samples=n_samples, noise_std=noise, lam=lam, dt=dt, q=q, r=r,
                         seed=seed, zeta_d=np.concatenate([omega, vel]), ref_mode=mode,
                         plant=ad["plant"], feedforward=ad["feedforward"])

    sim = raw["simulation"]
    horizon_s = get("simulation", "horizon_s", float)
    if horizon_s < 0:
        fail("simulation", "horizon_s", "must be >= 0")
    pos0 = get("simulation", "initial_position", lambda v: np.asarray(v, dtype=float).reshape(3))
    twist0 = get("simulation", "initial_twist", lambda v: np.asarray(v, dtype=float).reshape(6))

    n_trials = get("sweep", "n_trials", int)
    if n_trials < 1:
        fail("sweep", "n_trials", "must be >= 1")
    grid = raw["sweep"]["grid"]
    if not isinstance(grid, list) or not grid:
        fail("sweep", "grid", "must be a non-empty list of integers")
    for entry in grid:
        if isinstance(entry, bool) or not isinstance(entry, int) or entry < 18:
            fail("sweep", "grid", f"entry {entry!r} is not an integer >= 18")

    jobs = get("run", "jobs", int)
    if jobs < 0:
        fail("run", "jobs", "must be >= 0 (0 means all cores)")
    return RunConfig(raw, true_params, perturbation, cfg, int(round(horizon_s / dt)),
                     BodyState.at(pos=pos0, twist=twist0), n_trials, tuple(grid), seed,
                     str(raw["run"]["out_dir"]), jobs or default_jobs())


def load_config(path=None, overrides=None):
    """Merge the TOML file at ``path`` (if any) over the defaults and validate."""
    text = ""
    data = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw_bytes = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", path) from exc
        text = raw_bytes.decode("utf-8", errors="replace")
        try:
            data = tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            m = re.search(r"line (\d+)", str(exc))
            raise ConfigError(f"invalid TOML: {exc}", path, int(m.group(1)) if m else None) from exc
    raw = _merge(DEFAULTS, data, path, text)
    for (section, key), value in (overrides or {}).items():
        raw[section][key] = value
    return _build(raw, path, text)
