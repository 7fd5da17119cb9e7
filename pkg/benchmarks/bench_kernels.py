"""Time the batched geometry kernels on both backends.

    python3 benchmarks/bench_kernels.py --points 4096 --dim 4 --repeat 5
"""

import argparse
import time

import numpy as np

from aestruct import kernels
from aestruct._jit import NUMBA_AVAILABLE


def make_inputs(points, dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(points, dim, dim))
    g = g @ g.transpose(0, 2, 1) + dim * np.eye(dim)
    dg = rng.normal(size=(points, dim, dim, dim))
    dg = dg + dg.transpose(0, 1, 3, 2)
    J = rng.normal(size=(points, dim, dim))
    dJ = rng.normal(size=(points, dim, dim, dim))
    return g, np.linalg.inv(g), dg, J, dJ


def best_of(func, args, repeat):
    func(*args)  # warm-up, triggers JIT compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=4096)
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    g, g_inv, dg, J, dJ = make_inputs(args.points, args.dim, args.seed)
    gamma = kernels.levi_civita(g_inv, dg)
    D = kernels.covariant_derivative_j(gamma, J, dJ)
    cases = [
        ("levi_civita", kernels.levi_civita, (g_inv, dg)),
        ("covariant_derivative_j", kernels.covariant_derivative_j, (gamma, J, dJ)),
        ("covariant_derivative_g", kernels.covariant_derivative_g, (gamma, g, dg)),
        ("nabla_j_combination", kernels.nabla_j_combination, (D, J, 1.0, -1.0, -1.0)),
        ("nijenhuis_bracket", kernels.nijenhuis_bracket, (J, dJ)),
    ]
    backends = [b for b in kernels.BACKENDS if b != "numba" or NUMBA_AVAILABLE]
    previous = kernels.get_backend()
    print(f"points={args.points} dim={args.dim} repeat={args.repeat}")
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'max |diff|':>14}")
    try:
        for name, func, fargs in cases:
            row, results = [], []
            for b in backends:
                kernels.set_backend(b)
                row.append(best_of(func, fargs, args.repeat))
                results.append(func(*fargs))
            diff = max(float(np.max(np.abs(r - results[0]))) for r in results)
            print(f"{name:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row) + f"{diff:>14.2e}")
    finally:
        kernels.set_backend(previous)


if __name__ == "__main__":
    main()
