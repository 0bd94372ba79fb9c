"""Hot numeric kernels behind the density estimators.

Two interchangeable backends:

* ``numba`` (default) — ``@njit`` loops, compiled once and disk-cached.
* ``numpy`` — vectorised fallback, selected by setting ``REEKIT_NO_NUMBA=1``
  in the environment (or used automatically when numba is not importable).

Both compute the same Gaussian product-kernel sums; they differ only in
floating-point summation order, so results agree to ~1e-12 relative.
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _numba_disabled_by_env() -> bool:
    flag = os.environ.get("REEKIT_NO_NUMBA", "").strip().lower()
    return flag in {"1", "true", "yes", "on"}


def kde2d_numpy(px, py, hx, hy, grid_x, grid_y):
    """2D Gaussian KDE on a rectangular grid, separable-kernel formulation.

    Returns density of shape (len(grid_y), len(grid_x)) normalised so the
    full-plane integral is 1.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    kx = np.exp(-0.5 * ((grid_x[:, None] - px[None, :]) / hx) ** 2) / (hx * _SQRT_2PI)
    ky = np.exp(-0.5 * ((grid_y[:, None] - py[None, :]) / hy) ** 2) / (hy * _SQRT_2PI)
    return (ky @ kx.T) / px.size


def kde1d_numpy(points, h, grid):
    """1D Gaussian KDE evaluated over ``grid``."""
    points = np.asarray(points, dtype=np.float64)
    z = (grid[:, None] - points[None, :]) / h
    return np.exp(-0.5 * z * z).sum(axis=1) / (points.size * h * _SQRT_2PI)


_BACKEND = "numpy"
kde2d = kde2d_numpy
kde1d = kde1d_numpy

if not _numba_disabled_by_env():
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover - exercised only without numba
        pass
    else:
        _BACKEND = "numba"

        @njit(cache=True, parallel=True)
        def _kde2d_jit(px, py, hx, hy, grid_x, grid_y):
            # Same separable product-kernel formulation as the numpy path:
            # jitted per-axis kernel loops, BLAS for the contraction.
            ny = grid_y.size
            nx = grid_x.size
            n = px.size
            kx = np.empty((n, nx))
            for g in prange(nx):
                for i in range(n):
                    z = (grid_x[g] - px[i]) / hx
                    kx[i, g] = np.exp(-0.5 * z * z)
            ky = np.empty((ny, n))
            for g in prange(ny):
                for i in range(n):
                    z = (grid_y[g] - py[i]) / hy
                    ky[g, i] = np.exp(-0.5 * z * z)
            norm = 1.0 / (n * hx * hy * 2.0 * np.pi)
            return np.dot(ky, kx) * norm

        @njit(cache=True)
        def _kde1d_jit(points, h, grid):
            m = grid.size
            n = points.size
            out = np.empty(m)
            norm = 1.0 / (n * h * _SQRT_2PI)
            for j in range(m):
                acc = 0.0
                for i in range(n):
                    z = (grid[j] - points[i]) / h
                    acc += np.exp(-0.5 * z * z)
                out[j] = acc * norm
            return out

        def kde2d_numba(px, py, hx, hy, grid_x, grid_y):
            return _kde2d_jit(
                np.ascontiguousarray(px, dtype=np.float64),
                np.ascontiguousarray(py, dtype=np.float64),
                float(hx),
                float(hy),
                np.ascontiguousarray(grid_x, dtype=np.float64),
                np.ascontiguousarray(grid_y, dtype=np.float64),
            )

        def kde1d_numba(points, h, grid):
            return _kde1d_jit(
                np.ascontiguousarray(points, dtype=np.float64),
                float(h),
                np.ascontiguousarray(grid, dtype=np.float64),
            )

        kde2d = kde2d_numba
        kde1d = kde1d_numba


def backend() -> str:
    """Name of the active kernel backend: 'numba' or 'numpy'."""
    return _BACKEND


def warmup():
    """Trigger JIT compilation so first real use is not charged for it."""
    if _BACKEND == "numba":
        pts = np.array([0.0, 1.0])
        kde2d(pts, pts, 1.0, 1.0, pts, pts)
        kde1d(pts, 1.0, pts)
