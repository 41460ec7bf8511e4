"""Compare the numba-jitted kernels against the pure-numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import time by
LIEADAPT_DISABLE_NUMBA). Timings are the best of several repeats after a warm-up
call, so JIT compilation is excluded.

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from lieadapt import _jit
from lieadapt.adaptive import AdaptiveConfig, closed_loop_rollout, controller_gain, feedforward_input, fig1_initial_state
from lieadapt.error_dynamics import linearize
from lieadapt.lqr import solve_dare
from lieadapt.rigid_body import InertialParams
from lieadapt.se3 import exp_se3, log_se3

repeats = int(sys.argv[1])
p = InertialParams.paper()
cfg = AdaptiveConfig()
model = linearize(cfg.zeta_d, p, cfg.dt)
gain = controller_gain(p, cfg)
u_ff = feedforward_input(p, p, cfg)
x0 = fig1_initial_state()
twists = np.random.default_rng(0).uniform(-1, 1, size=(2000, 6))

def geometry():
    for xi in twists:
        log_se3(exp_se3(xi))

cases = {
    "exp/log x2000": geometry,
    "rollout 1500 steps": lambda: closed_loop_rollout(p, gain, u_ff, x0, 1500, cfg),
    "DARE R=I": lambda: solve_dare(model, cfg.q, np.eye(6)),
}
out = {}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps({"numba": _jit.USE_NUMBA, "times": out}))
"""


def run(disable, repeats):
    env = dict(os.environ)
    env.pop("LIEADAPT_DISABLE_NUMBA", None)
    if disable:
        env["LIEADAPT_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", CHILD, str(repeats)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    jit = run(False, args.repeats)
    ref = run(True, args.repeats)
    if not jit["numba"]:
        print("numba is not importable; both runs used the numpy path")
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_ref in ref["times"].items():
        t_jit = jit["times"][name]
        print(f"{name:<22}{t_jit:>12.4f}{t_ref:>12.4f}{t_ref / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
