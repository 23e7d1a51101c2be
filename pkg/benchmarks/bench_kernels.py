#!/usr/bin/env python3
"""Time the numba kernels against their pure-numpy originals.

Every jitted kernel keeps the undecorated function as ``.py_func``, so both
paths run in one process on identical inputs.  Compilation is excluded (each
kernel is called once before timing).  ``--presets`` additionally times a few
figure presets end to end in subprocesses, once per backend.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat N] [--presets]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from nhdyn import _accel, _kernels, models, states
from nhdyn.closed_system import closed_step_propagator, closed_superoperator
from nhdyn.open_system import DephasingConfig, build_liouvillian
from nhdyn._evolve import trace_leak_vector
from nhdyn.linalg import diag_indices_vec, vec
from nhdyn.metrics import SPIN_FLIP


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    h2 = models.pt_two_qubit(1.25).matrix
    h3 = models.apt_general(3, 0.5, 0.2).matrix
    sup2 = build_liouvillian(h2, DephasingConfig.two_qubit(0.1, 0.1, 0.1))
    sup3 = build_liouvillian(h3, DephasingConfig((0.1, 0.1, 0.1), 0.1))
    y0 = vec(states.bell_state())
    diag = diag_indices_vec(4)
    grid = np.linspace(0, 20, 201)
    prop = closed_step_propagator(h2, 0.01)
    rng = np.random.default_rng(0)
    traj = np.array([vec(states.random_density_matrix(4, rng)) for _ in range(2001)])
    traj2 = np.array([vec(states.random_density_matrix(4, rng)) for _ in range(2001)])
    return [
        ("expm 16x16", _kernels.expm_kernel, (sup2 * 3.0,)),
        ("expm 64x64", _kernels.expm_kernel, (sup3 * 3.0,)),
        ("dopri5 2 qubits t=20", _kernels.dopri5_kernel,
         (closed_superoperator(h2), trace_leak_vector(h2), diag, y0, grid, 1e-9, 1e-12, 10**6)),
        ("step 2000 x 16", _kernels.step_kernel, (prop, y0, diag, 2000)),
        ("trace distance x 2001", _kernels.trace_distance_series, (traj, traj2, 4)),
        ("concurrence x 2001", _kernels.concurrence_series, (traj, SPIN_FLIP)),
    ]


def bench_kernels(repeat):
    print(f"backend at import: {_accel.backend_name()}")
    print(f"{'kernel':24s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, kernel, args in cases():
        jit = best_of(kernel, args, repeat) if _accel.USE_NUMBA else float("nan")
        py = best_of(kernel.py_func, args, repeat)
        print(f"{name:24s} {1e3 * jit:11.3f} {1e3 * py:11.3f} {py / jit:7.1f}x")


def bench_presets(names=("fig1c", "fig4c", "fig6c")):
    code = ("import time; from nhdyn import experiments as ex; ex.run_preset({n!r}); "
            "s = time.perf_counter(); ex.run_preset({n!r}); print(time.perf_counter() - s)")
    print(f"\n{'preset':10s} {'numba [s]':>10s} {'numpy [s]':>10s}")
    for n in names:
        row = []
        for flag in ("0", "1"):
            env = dict(os.environ, NHDYN_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", code.format(n=n)], env=env,
                                 capture_output=True, text=True, check=True)
            row.append(float(out.stdout.strip()))
        print(f"{n:10s} {row[0]:10.3f} {row[1]:10.3f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--presets", action="store_true", help="also time presets end to end")
    args = p.parse_args()
    bench_kernels(args.repeat)
    if args.presets:
        bench_presets()


if __name__ == "__main__":
    main()
