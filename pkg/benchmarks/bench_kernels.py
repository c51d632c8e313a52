#!/usr/bin/env python3
"""Time the numba and pure-numpy variant of every kernel on the same inputs.

    python benchmarks/bench_kernels.py [--repeat R] [--threads T]

Each kernel is run once first so JIT compilation is excluded. Outputs of the
two variants are compared before timing.
"""
import argparse
import time

import numpy as np

from gridloss import _accel, kernels
from gridloss.graph import build_laplacian, random_connected_graph


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    n = 12
    Lp = build_laplacian(random_connected_graph(n, rng=rng, weights=(0.5, 2.0))).Lplus
    mu = rng.normal(size=n)
    mu -= mu.mean()
    alpha = rng.dirichlet(np.ones(n))
    omega = rng.normal(size=(200_000, n))
    yield "realized_losses (N=2e5, n=12)", kernels.realized_losses_numba, kernels.realized_losses_numpy, (
        Lp, mu, omega, alpha)

    n = 20
    Lp = build_laplacian(random_connected_graph(n, rng=rng)).Lplus
    b = rng.normal(size=n)
    yield "subset_quadratic_sums (n=20, k=10)", kernels.subset_quadratic_sums_numba, \
        kernels.subset_quadratic_sums_numpy, (Lp, b, 10)

    n = 40
    A = rng.normal(size=(n, n))
    H = A @ A.T / n + np.eye(n)
    g = rng.normal(size=n)
    mask = rng.random(n) < 0.6
    mask[0] = True
    x0 = np.where(mask, 1.0 / mask.sum(), 0.0)
    step = 1.0 / np.linalg.eigvalsh(H).max()
    yield "projected_gradient (n=40, 20k iters)", kernels.projected_gradient_numba, \
        kernels.projected_gradient_numpy, (H, g, mask, x0, step, 20_000, 0.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    _accel.set_threads(args.threads)
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<38}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fast, slow, inputs in cases(rng):
        a, b = fast(*inputs), slow(*inputs)
        a = a[0] if isinstance(a, tuple) else a
        b = b[0] if isinstance(b, tuple) else b
        if not np.allclose(a, b, rtol=1e-9, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        t_fast = best_of(lambda: fast(*inputs), args.repeat)
        t_slow = best_of(lambda: slow(*inputs), args.repeat)
        print(f"{name:<38}{t_fast * 1e3:>12.2f}{t_slow * 1e3:>12.2f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
