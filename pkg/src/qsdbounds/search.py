"""Batched one-dimensional minimisation: dense scan, then golden-section refinement.

Objectives take an array of abscissae of shape ``(n_batch, k)`` and return
values of the same shape, so many independent problems (for instance every
node at one depth of an adaptive measurement tree) are solved in lockstep.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

BatchObjective = Callable[[np.ndarray], np.ndarray]


def golden_section(f: BatchObjective, lo: np.ndarray, hi: np.ndarray, xtol: float = 1e-9):
    """Minimise each row of ``f`` on ``[lo, hi]`` by golden-section search.

    Returns ``(x, fx)`` arrays of shape ``(n_batch,)``.  The iteration count
    is fixed by the widest bracket so every row advances in lockstep.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    width = float(np.max(hi - lo, initial=0.0))
    n_iter = 0 if width <= xtol else math.ceil(math.log(xtol / width) / math.log(INV_PHI))
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f12 = f(np.stack([x1, x2], axis=1))
    f1, f2 = f12[:, 0], f12[:, 1]
    for _ in range(n_iter):
        left = f1 <= f2
        # left: keep [lo, x2], old x1 becomes new x2; otherwise keep [x1, hi]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new_x = np.where(left, hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo))
        f_new = f(new_x[:, None])[:, 0]
        x2, f2, x1, f1 = (
            np.where(left, x1, new_x),
            np.where(left, f1, f_new),
            np.where(left, new_x, x2),
            np.where(left, f_new, f2),
        )
    take1 = f1 <= f2
    return np.where(take1, x1, x2), np.where(take1, f1, f2)


def scan_minimize(
    f: BatchObjective,
    n_batch: int,
    lo: float,
    hi: float,
    n_scan: int,
    xtol: float = 1e-9,
):
    """Global minimum of each row over ``[lo, hi]``.

    ``n_scan`` equally spaced points (both ends included) locate the best
    cell; golden-section search then refines within the two neighbouring
    grid cells.  The returned value is the smallest seen, scan included.
    """
    if n_scan < 3:
        raise ValueError("n_scan must be >= 3")
    grid = np.linspace(lo, hi, n_scan)
    vals = f(np.broadcast_to(grid, (n_batch, n_scan)).copy())
    j = np.argmin(vals, axis=1)
    step = grid[1] - grid[0]
    a = np.maximum(grid[j] - step, lo)
    b = np.minimum(grid[j] + step, hi)
    x, fx = golden_section(f, a, b, xtol)
    scan_best = vals[np.arange(n_batch), j]
    better = scan_best < fx
    return np.where(better, grid[j], x), np.where(better, scan_best, fx)
