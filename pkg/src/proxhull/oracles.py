"""Closed-form reference values for the two prototype problems.

1-D: the double well ``f(x) = min(|x-1|, |x+1|)`` on ``[-2, 2]``.
2-D: ``f(x) = (|x| - 1)^2`` on the disk of radius 2.

All evaluators are vectorised over numpy arrays.  Where branch regions
share a seam, the first listed branch wins; the formulas are continuous
there so the choice does not change the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid_field import ScalarField, as_mask

__all__ = [
    "OracleCurve",
    "double_well",
    "double_well_moreau_lower",
    "lower_transform_1d_exact",
    "lower_transform_1d_inf_exact",
    "radial_sqdist",
    "lower_transform_2d_exact",
    "lower_transform_2d_inf_exact",
    "linf_error",
    "error_bound_lipschitz",
    "error_bound_modulus",
    "grid_coords",
]


@dataclass(frozen=True)
class OracleCurve:
    """A closed form evaluated at grid coordinates.

    ``evaluator`` maps an array of points of shape ``(..., n)`` (or ``(...)``
    in 1-D) to values; ``valid_region`` is a list of ``(lo, hi)`` per axis.
    """

    evaluator: Callable
    valid_region: list
    params: dict = field(default_factory=dict)

    def __call__(self, pts):
        return self.evaluator(pts)


def double_well(x):
    x = np.asarray(x, dtype=np.float64)
    return np.minimum(np.abs(x - 1.0), np.abs(x + 1.0))


def _huber(t, lam):
    a = np.abs(t)
    return np.where(a <= 1.0 / (2.0 * lam), lam * t * t, a - 1.0 / (4.0 * lam))


def double_well_moreau_lower(x, lam):
    """Lower Moreau envelope of the double well extended to the whole line.

    Each distance ``|x - a|`` has a Huber-shaped envelope, and the envelope
    of a minimum is the minimum of the envelopes.
    """
    x = np.asarray(x, dtype=np.float64)
    return np.minimum(_huber(x - 1.0, lam), _huber(x + 1.0, lam))


def _check_domain(x, bound, what):
    if np.any(np.abs(x) > bound + 1e-12):
        raise ValueError(f"{what}: argument outside |x| <= {bound}")


def lower_transform_1d_exact(x, lam):
    """Local lower transform of the double well with a min-value frame at ``|x| = 2``.

    Valid for ``lam >= 1`` and ``|x| <= 2``.
    """
    if lam < 1:
        raise ValueError("closed form established only for lam >= 1")
    x = np.asarray(x, dtype=np.float64)
    _check_domain(x, 2.0, "lower_transform_1d_exact")
    s = math.sqrt(lam)
    x1 = 2.0 - s / lam
    x2 = 1.0 / (2.0 * lam)
    ax = np.abs(x)

    def a_poly(t):
        return -lam * t * t + (2 * lam - 2 * s + 1) * t - lam + 2 * s - 1

    # thresholds checked from the outside in, so the seams cannot fall
    # between branches through rounding
    conds = [ax >= x1, ax >= x2]
    vals = [a_poly(ax - 1.0), double_well(x)]
    out = np.select(conds, vals, default=1 - 1 / (4 * lam) - lam * x * x)
    return out if out.ndim else float(out)


def lower_transform_1d_inf_exact(x, lam):
    """Lower transform of the double well extended by +inf outside ``[-2, 2]``.

    Valid for ``lam >= 1/2`` and ``|x| <= 2``.
    """
    if lam < 0.5:
        raise ValueError("closed form established only for lam >= 1/2")
    x = np.asarray(x, dtype=np.float64)
    _check_domain(x, 2.0, "lower_transform_1d_inf_exact")
    out = np.where(np.abs(x) <= 1 / (2 * lam), 1 - 1 / (4 * lam) - lam * x * x, double_well(x))
    return out if out.ndim else float(out)


def radial_sqdist(pts):
    """Squared distance to the unit circle, ``(|x| - 1)^2``; ``pts`` has last axis 2."""
    pts = np.asarray(pts, dtype=np.float64)
    r = np.hypot(pts[..., 0], pts[..., 1])
    out = (r - 1.0) ** 2
    return out if out.ndim else float(out)


def _radial_consts(lam):
    xp = 2.0 - 1.0 / math.sqrt(1.0 + lam)
    xs = 1.0 / (1.0 + lam)
    slope = 2.0 * (1.0 + 2.0 * lam) - 2.0 * math.sqrt(1.0 + lam)
    return xp, xs, slope


def lower_transform_2d_exact(r, lam):
    """Radial profile of the local lower transform of ``(|x|-1)^2`` on the
    radius-2 disk with zero outside; valid for ``lam >= 1``."""
    if lam < 1:
        raise ValueError("closed form established only for lam >= 1")
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    xp, xs, slope = _radial_consts(lam)
    conds = [r > 2, r >= xp, r >= xs]
    vals = [
        np.zeros_like(r),
        -np.abs(slope * (r - 2)) + 4 * lam - lam * r * r,
        (r - 1.0) ** 2,
    ]
    out = np.select(conds, vals, default=lam / (1 + lam) - lam * r * r)
    return out if out.ndim else float(out)


def lower_transform_2d_inf_exact(r, lam):
    """Radial profile of the lower transform of ``(|x|-1)^2`` extended by +inf
    outside the radius-2 disk; valid for ``r < 2``."""
    r = np.asarray(r, dtype=np.float64)
    xs = 1.0 / (1.0 + lam)
    out = np.where(r <= xs, lam / (1 + lam) - lam * r * r, (r - 1.0) ** 2)
    return out if out.ndim else float(out)


def grid_coords(dims, spacing, origin):
    """Coordinates of grid nodes as an array of shape ``dims + (n,)``
    (or just ``dims`` in 1-D)."""
    axes = [o + spacing * np.arange(d) for d, o in zip(dims, np.atleast_1d(origin))]
    if len(axes) == 1:
        return axes[0]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def linf_error(a: ScalarField, b, mask=None, coords=None) -> float:
    """max |a - b| over the grid, or over ``mask`` when given.

    ``b`` may be another field, an array, or an :class:`OracleCurve`
    evaluated at ``coords``.
    """
    if isinstance(b, OracleCurve):
        if coords is None:
            raise ValueError("an OracleCurve needs grid coordinates")
        ref = np.asarray(b(coords), dtype=np.float64)
    elif isinstance(b, ScalarField):
        ref = b.values
    else:
        ref = np.asarray(b, dtype=np.float64)
    if ref.shape != a.dims:
        raise ValueError(f"shape mismatch {a.dims} vs {ref.shape}")
    diff = np.abs(a.values - ref)
    if mask is not None:
        diff = diff[as_mask(mask, a.dims)]
        if diff.size == 0:
            return 0.0
    return float(diff.max())


def error_bound_lipschitz(L: float, h: float, lam: float, n: int) -> float:
    """Pointwise bound on |discrete - continuous| lower envelope for L-Lipschitz f."""
    return (2 + math.sqrt(n)) * L * h + 2 * lam * h * h * n


def error_bound_modulus(a: float, b: float, h: float, lam: float, n: int,
                        omega: Callable[[float], float]) -> float:
    """Same bound for f with modulus of continuity ``omega(t) <= a t + b``."""
    d = math.sqrt(omega(a / lam + math.sqrt(b / lam)))
    return omega(h * math.sqrt(n)) + 2 * lam * h * h * n + 2 * h * math.sqrt(lam) * d
