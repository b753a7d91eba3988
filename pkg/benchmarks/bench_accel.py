#!/usr/bin/env python3
"""Benchmark the compiled hot kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_accel.py [--n N]

The compiled path is what you get by default; setting COHSETS_NO_NUMBA=1
switches the whole package to the numpy fallbacks benchmarked here.
"""

import argparse
import time

import numpy as np

from cohsets import _accel


def _best_of(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000, help="problem size")
    args = parser.parse_args()
    n = args.n
    rng = np.random.default_rng(0)

    rows = []

    # Gaussian Gram matrix
    A = rng.standard_normal((n, 2))
    _accel.gaussian_gram(A[:4], A[:4], 1.0)  # trigger compilation
    rows.append((
        f"gaussian_gram ({n}x{n})",
        _best_of(lambda: _accel.gaussian_gram(A, A, 1.0)),
        _best_of(lambda: _accel.gaussian_gram_numpy(A, A, 1.0)),
    ))

    # haversine Gram matrix
    L = np.stack([rng.uniform(-180, 180, n), rng.uniform(-85, 85, n)], axis=1)
    _accel.haversine_gram(L[:4], L[:4], 30.0, 6371.0)
    rows.append((
        f"haversine_gram ({n}x{n})",
        _best_of(lambda: _accel.haversine_gram(L, L, 30.0, 6371.0)),
        _best_of(lambda: _accel.haversine_gram_numpy(L, L, 30.0, 6371.0)),
    ))

    # jet advection (RK4, tau=40, step=0.1)
    X = np.stack([rng.uniform(0, 20, n), rng.uniform(-3, 3, n)], axis=1)
    jet_args = (
        0.0, 40.0, 0.1, 5.413824, 1.77,
        np.array([0.075, 0.4, 0.3]),
        np.array([0.7828389504, 1.10983392, 2.495772864]),
        np.array([0.31392246115209543, 0.6278449223041909, 0.9417673834562862]),
    )
    _accel.bickley_integrate(X[:4].copy(), *jet_args)
    rows.append((
        f"bickley_integrate ({n} trajectories, tau=40)",
        _best_of(lambda: _accel.bickley_integrate(X.copy(), *jet_args)),
        _best_of(lambda: _accel.bickley_integrate_numpy(X.copy(), *jet_args)),
    ))

    # SDE step block (1000 Euler-Maruyama steps)
    P = rng.uniform(-2, 2, (n, 2))
    P[np.hypot(P[:, 0], P[:, 1]) < 0.1] += 0.5
    noise = rng.standard_normal((1000, n, 2))
    _accel.em_advance(P[:4].copy(), noise[:, :4], 0.0, 1e-3, 3.0, 5.0)
    rows.append((
        f"em_advance ({n} particles, 1000 steps)",
        _best_of(lambda: _accel.em_advance(P.copy(), noise, 0.0, 1e-3, 3.0, 5.0)),
        _best_of(lambda: _accel.em_advance_numpy(P.copy(), noise, 0.0, 1e-3, 3.0, 5.0)),
    ))

    backend = "numba" if _accel.NUMBA_ENABLED else "numpy (COHSETS_NO_NUMBA set)"
    print(f"default backend: {backend}\n")
    print(f"{'kernel':<45} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for name, fast, ref in rows:
        print(f"{name:<45} {fast*1e3:>8.1f}ms {ref*1e3:>8.1f}ms {ref/fast:>7.1f}x")


if __name__ == "__main__":
    main()
