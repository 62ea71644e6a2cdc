"""Numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each row times the ``_jit`` and ``_np`` version of one kernel on the same
input (best of ``--repeat`` runs, JIT compilation excluded) and reports the
largest difference between their outputs.
"""
import argparse
import timeit

import numpy as np

from annulus_rotation import kernels as K
from annulus_rotation.gallery import psi_inv


def cases(quick):
    rng = np.random.default_rng(0)
    s = 0.2 if quick else 1.0

    n_orbits, n_steps = int(200 * s) or 1, int(2000 * s)
    rho0 = psi_inv(rng.uniform(-1.9, -1.1, n_orbits))
    cth = np.cos(2 * np.pi * rng.uniform(0, 1, n_orbits))
    yield "transverse_radii fwd", (K._transverse_radii_jit, K._transverse_radii_np), (rho0, cth, n_steps, True)
    yield "transverse_radii bwd", (K._transverse_radii_jit, K._transverse_radii_np), (rho0, cth, n_steps // 4, False)

    n_b = int(3000 * s)
    yield "boomerang_radii bwd", (K._boomerang_radii_jit, K._boomerang_radii_np), (-1.0, n_b, False)
    radii = K._boomerang_radii_np(-1.0, n_b, True)
    steps = np.arange(n_b + 1, dtype=np.int64)
    yield "boomerang_thetas fwd", (K._boomerang_thetas_jit, K._boomerang_thetas_np), (radii, steps, 0.5)
    yield "boomerang_thetas bwd", (K._boomerang_thetas_jit, K._boomerang_thetas_np), (radii[: n_b // 3], -steps[: n_b // 3], 0.5)

    t = np.linspace(0, 40 * np.pi, int(200_000 * s))
    dx, dy = (1 + t) * np.cos(t), (1 + t) * np.sin(t)
    yield "unwrap_winding", (K._unwrap_winding_jit, K._unwrap_winding_np), (dx, dy, 1e-12, 32)

    m = int(1500 * s)
    walk = np.column_stack([np.arange(m, dtype=float), np.cumsum(rng.normal(0, 0.3, m))])
    yield "first_crossing self", (K._first_crossing_jit, K._first_crossing_np), (walk, walk, True, -1, -1)

    sym = rng.integers(0, 2, int(1_000_000 * s)).astype(np.int64)
    yield "coded_fractions", (K._coded_fractions_jit, K._coded_fractions_np), (sym, 0.5)


def max_diff(a, b):
    # tuple results: compare the leading value (the winding, or the crossing index)
    if isinstance(a, tuple):
        a, b = a[0], b[0]
    a, b = np.atleast_1d(np.asarray(a, dtype=float)), np.atleast_1d(np.asarray(b, dtype=float))
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()

    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max |diff|':>13}")
    for name, (fj, fn), a in cases(args.quick):
        rj = fj(*a)  # compile
        rn = fn(*a)
        tj = min(timeit.repeat(lambda: fj(*a), number=1, repeat=args.repeat))
        tn = min(timeit.repeat(lambda: fn(*a), number=1, repeat=args.repeat))
        diff = max_diff(rj, rn)
        print(f"{name:<24}{tj * 1e3:>12.2f}{tn * 1e3:>12.2f}{tn / tj:>10.1f}{diff:>13.2e}")


if __name__ == "__main__":
    main()
