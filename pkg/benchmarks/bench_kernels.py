"""Benchmark the numba and numpy KDE kernel backends.

The 2D grid evaluation is the hottest loop in the toolkit (points x 128^2
kernel evaluations per density payload). This script times both backends on
the same seeded data and prints a comparison table:

    python3 benchmarks/bench_kernels.py [--points 2000,20000,100000] [--repeat 5]

The active backend used by the package follows REEKIT_NO_NUMBA; the
benchmark always times both implementations directly.
"""

import argparse
import time

import numpy as np

from reekit._kernels import backend, kde1d_numpy, kde2d_numpy

try:
    from reekit._kernels import kde1d_numba, kde2d_numba

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

GRID = 128


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_2d(n: int, repeat: int) -> dict:
    rng = np.random.default_rng(n)
    px = rng.normal(0, 1, n)
    py = rng.normal(0, 1, n)
    gx = np.linspace(-4, 4, GRID)
    gy = np.linspace(-4, 4, GRID)
    h = float(np.std(px) * n ** (-1 / 6))
    row = {"n": n, "numpy_s": _time(kde2d_numpy, px, py, h, h, gx, gy, repeat=repeat)}
    if HAVE_NUMBA:
        kde2d_numba(px[:8], py[:8], h, h, gx, gy)  # compile outside timing
        row["numba_s"] = _time(kde2d_numba, px, py, h, h, gx, gy, repeat=repeat)
        a = kde2d_numpy(px, py, h, h, gx, gy)
        b = kde2d_numba(px, py, h, h, gx, gy)
        row["max_rel_diff"] = float(np.max(np.abs(a - b) / np.max(a)))
    return row


def bench_1d(n: int, repeat: int) -> dict:
    rng = np.random.default_rng(n + 1)
    pts = rng.normal(0, 1, n)
    grid = np.linspace(-4, 4, 256)
    h = float(np.std(pts) * n ** (-1 / 5))
    row = {"n": n, "numpy_s": _time(kde1d_numpy, pts, h, grid, repeat=repeat)}
    if HAVE_NUMBA:
        kde1d_numba(pts[:8], h, grid)
        row["numba_s"] = _time(kde1d_numba, pts, h, grid, repeat=repeat)
    return row


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", default="2000,20000,100000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.points.split(",")]

    print(f"active package backend: {backend()}")
    print(f"numba available: {HAVE_NUMBA}")
    print(f"\n2D KDE on a {GRID}x{GRID} grid (best of {args.repeat}):")
    header = f"{'points':>10} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>9} {'max rel diff':>13}"
    print(header)
    for n in sizes:
        row = bench_2d(n, args.repeat)
        if HAVE_NUMBA:
            speedup = row["numpy_s"] / row["numba_s"]
            print(
                f"{row['n']:>10} {row['numpy_s']:>12.4f} {row['numba_s']:>12.4f} "
                f"{speedup:>8.2f}x {row['max_rel_diff']:>13.2e}"
            )
        else:
            print(f"{row['n']:>10} {row['numpy_s']:>12.4f} {'-':>12} {'-':>9} {'-':>13}")

    print("\n1D KDE on a 256-point trace:")
    print(f"{'points':>10} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>9}")
    for n in sizes:
        row = bench_1d(n, args.repeat)
        if HAVE_NUMBA:
            print(
                f"{row['n']:>10} {row['numpy_s']:>12.4f} {row['numba_s']:>12.4f} "
                f"{row['numpy_s'] / row['numba_s']:>8.2f}x"
            )
        else:
            print(f"{row['n']:>10} {row['numpy_s']:>12.4f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
