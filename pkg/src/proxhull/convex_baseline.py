"""Stencil-based convex envelope iteration and the transforms built on it.

Each sweep replaces ``u(x)`` by the smallest of ``f(x)`` and the midpoint
averages ``(u(x + r h) + u(x - r h)) / 2`` over the ``(3^n - 1) / 2``
direction pairs of the 3^n stencil.  The outer layer of the grid keeps the
values of ``f``.  There is no known convergence rate; this module exists as
a baseline for the Moreau-envelope route in :mod:`proxhull.transforms`.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .grid_field import ScalarField
from .moreau import ConvergenceReport
from .transforms import TransformResult

__all__ = [
    "BaselineParams",
    "convex_envelope_iterative",
    "lower_transform_convex",
    "upper_transform_convex",
    "stencil_directions",
]


@dataclass(frozen=True)
class BaselineParams:
    tol: float = 1e-7
    max_iterations: int = 1_000_000
    norm: str = "linf"
    time_limit: float | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.norm not in ("linf", "l2"):
            raise ValueError("norm must be 'linf' or 'l2'")


def stencil_directions(n: int):
    """One representative of each +-r pair in the 3^n stencil."""
    dirs = []
    for r in itertools.product((-1, 0, 1), repeat=n):
        if any(r) and r > tuple(-x for x in r):
            dirs.append(r)
    return dirs


def _interior(shape, r):
    return tuple(slice(1 + rj, d - 1 + rj) for rj, d in zip(r, shape))


def convex_envelope_iterative(f: ScalarField, p: BaselineParams = BaselineParams()):
    """Iterate the midpoint rule until the change drops to ``p.tol``.

    Returns ``(field, report)``.  Running out of ``max_iterations`` or
    ``time_limit`` seconds leaves ``report.converged`` False.
    """
    g = f.values
    if any(d < 3 for d in g.shape):
        return f, ConvergenceReport(0, [], True)
    dirs = stencil_directions(g.ndim)
    inner = tuple(slice(1, d - 1) for d in g.shape)
    g_inner = g[inner]
    cell = f.spacing ** g.ndim
    u = g.copy()
    report = ConvergenceReport()
    start = time.perf_counter()
    for m in range(1, p.max_iterations + 1):
        best = g_inner.copy()
        for r in dirs:
            neg = tuple(-x for x in r)
            avg = 0.5 * (u[_interior(g.shape, r)] + u[_interior(g.shape, neg)])
            np.minimum(best, avg, out=best)
        delta = best - u[inner]
        if p.norm == "linf":
            diff = float(np.max(np.abs(delta)))
        else:
            diff = math.sqrt(float(np.sum(delta * delta)) * cell)
        u[inner] = best
        report.iterations = m
        report.successive_diffs.append(diff)
        if diff <= p.tol:
            report.converged = True
            break
        if p.time_limit is not None and time.perf_counter() - start > p.time_limit:
            break
    return f.with_values(u), report


def _centered_weight(f: ScalarField, lam: float) -> np.ndarray:
    grids = np.meshgrid(*[f.spacing * (np.arange(d) - (d - 1) / 2.0) for d in f.dims],
                        indexing="ij")
    return lam * sum(x * x for x in grids)


def lower_transform_convex(f: ScalarField, lam: float,
                           p: BaselineParams = BaselineParams()) -> TransformResult:
    """``co[f + lam |x - c|^2] - lam |x - c|^2`` with ``c`` the grid centre."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    w = _centered_weight(f, lam)
    co, report = convex_envelope_iterative(f.with_values(f.values + w), p)
    return TransformResult(f.with_values(co.values - w), (report,))


def upper_transform_convex(f: ScalarField, lam: float,
                           p: BaselineParams = BaselineParams()) -> TransformResult:
    """``lam |x - c|^2 - co[lam |x - c|^2 - f]``, computed as ``-lower(-f)``."""
    res = lower_transform_convex(-f, lam, p)
    return TransformResult(-res.field, res.per_pass)

