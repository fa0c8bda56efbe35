"""Benchmark the Lindblad RK4 stepper backends (compiled vs numpy).

Runs the same driven, noisy evolution through both kernels and reports
steps/second.  Usage:

    python benchmarks/bench_lindblad.py [--L 6] [--steps 2000]
"""

import argparse
import time

import numpy as np

from dipsim._kernels import get_backend
from dipsim.hamiltonian import SpinSystem, build_drive, build_xy_hamiltonian
from dipsim.lindblad import NoiseParams, _Workspace, default_ramp
from dipsim.units import TWO_PI


def bench(L, nsteps, repeats=3):
    j1 = 100.0
    system = SpinSystem(L=L, coupling=(j1, 0.5 * j1))
    schedule = default_ramp(L, j1)
    noise = NoiseParams(kappa_2pikHz=100.0, gamma_2pikHz=100.0)
    ws = _Workspace(system, schedule, noise)
    dt = 1.0 / (50.0 * ws.norm_bound(0.0, schedule.T))
    nodes = ws.coeffs_at(0.5 * dt * np.arange(2 * nsteps + 1))

    rho0 = np.zeros((ws.dim, ws.dim), dtype=complex)
    rho0[0, 0] = 1.0

    print("L=%d (dim %d), %d steps, dt=%.3g us" % (L, ws.dim, nsteps, dt))
    results = {}
    for name in ("python", "cython"):
        try:
            step, label = get_backend(name)
        except ImportError:
            print("%-8s not built" % name)
            continue
        best = float("inf")
        for _ in range(repeats):
            rho = rho0.copy()
            t0 = time.perf_counter()
            step(
                rho,
                ws.h0,
                ws.h_terms,
                nodes,
                ws.damp,
                ws.decay_src,
                ws.decay_dst,
                ws.decay_w,
                dt,
                nsteps,
            )
            best = min(best, time.perf_counter() - t0)
        rate = nsteps / best
        results[name] = rate
        print("%-8s %8.0f steps/s  (%.2f us/step)" % (label, rate, 1e6 * best / nsteps))
    if len(results) == 2:
        print("speedup: %.2fx" % (results["cython"] / results["python"]))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--L", type=int, default=6)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()
    bench(args.L, args.steps)
