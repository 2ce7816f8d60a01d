"""Compensated convex transforms as mixed Moreau envelopes.

    lower transform  C^l(f) = M^lam(M_lam(f))     (an opening, <= f)
    upper transform  C^u(f) = M_lam(M^lam(f))     (a closing, >= f)

Three flavours are exposed:

* ``lower_transform`` / ``upper_transform`` work on the grid as given.
* ``local_lower_transform`` / ``local_upper_transform`` first add a
  one-cell frame holding ``min f`` (resp. ``max f``), keep the frame fixed
  during both envelope passes and crop it off again.  On a box these agree
  with the transforms of the constant extension of ``f`` to all of space.
* ``global_transform_on_padded`` pads by an arbitrary number of cells of an
  arbitrary value, which is how the unbounded (+inf) extension is
  approximated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid_field import FrameSpec, ScalarField, as_mask, crop, extend_masked, pad_frame
from .moreau import EnvelopeParams, _iterate_lower

__all__ = [
    "TransformResult",
    "lower_transform",
    "upper_transform",
    "local_lower_transform",
    "local_upper_transform",
    "average_transform",
    "default_big_m",
    "global_transform_on_padded",
    "frame_mask",
]


@dataclass
class TransformResult:
    field: ScalarField
    per_pass: tuple

    @property
    def total_iterations(self) -> int:
        return sum(r.iterations for r in self.per_pass)


def frame_mask(dims, width: int = 1) -> np.ndarray:
    """True on the outer ``width`` cells of every axis."""
    m = np.ones(dims, dtype=bool)
    m[tuple(slice(width, d - width) for d in dims)] = False
    return m


def _opening(values: np.ndarray, h: float, p: EnvelopeParams, frozen=None):
    """Upper envelope of the lower envelope (array level)."""
    low, r1 = _iterate_lower(values, h, p, frozen)
    neg_up, r2 = _iterate_lower(-low, h, p, frozen)
    # (a + w) - w can round above a; the exact opening never exceeds the data
    return np.minimum(-neg_up, values), (r1, r2)


def _closing(values: np.ndarray, h: float, p: EnvelopeParams, frozen=None):
    """Lower envelope of the upper envelope, written as ``-opening(-v)``."""
    out, reports = _opening(-values, h, p, frozen)
    return -out, reports


def lower_transform(f: ScalarField, p: EnvelopeParams) -> TransformResult:
    """Mixed envelopes with infima and suprema taken over the grid itself."""
    out, reports = _opening(f.values, f.spacing, p)
    return TransformResult(f.with_values(out), reports)


def upper_transform(f: ScalarField, p: EnvelopeParams) -> TransformResult:
    out, reports = _closing(f.values, f.spacing, p)
    return TransformResult(f.with_values(out), reports)


def _check_local_dims(f: ScalarField):
    if any(d < 2 for d in f.dims):
        raise ValueError(f"local transforms need at least 2 cells per axis, got dims {f.dims}")


def local_lower_transform(f: ScalarField, p: EnvelopeParams) -> TransformResult:
    """Lower transform of ``f`` framed by ``min f``; the frame is held fixed."""
    _check_local_dims(f)
    ext = pad_frame(f, FrameSpec(1, "min"))
    out, reports = _opening(ext.values, f.spacing, p, frame_mask(ext.dims))
    return TransformResult(crop(ext.with_values(out), 1), reports)


def local_upper_transform(f: ScalarField, p: EnvelopeParams) -> TransformResult:
    """Upper transform of ``f`` framed by ``max f``; equals ``-local_lower(-f)``."""
    res = local_lower_transform(-f, p)
    return TransformResult(-res.field, res.per_pass)


def default_big_m(f_on_k: ScalarField, k_mask, lam: float) -> float:
    """A value of M large enough that the big-M cells never win an envelope.

    Uses ``max_K |f| + lam * diam(grid)^2 + 1`` so that both ``M`` and
    ``-M`` clear the data by more than any quadratic penalty on the grid.
    """
    k = as_mask(k_mask, f_on_k.dims)
    known = f_on_k.values[k]
    diam2 = f_on_k.spacing ** 2 * float(sum(d * d for d in f_on_k.dims))
    return float(np.abs(known).max()) + lam * diam2 + 1.0


def average_transform(f_on_k: ScalarField, k_mask, lam: float, big_m: float | None = None,
                      p: EnvelopeParams | None = None) -> TransformResult:
    """Mean of the lower transform of the +M extension and the upper
    transform of the -M extension.

    Unknown cells (outside ``K``) are filled with ``+M`` / ``-M``; a one-cell
    frame carries ``min_K f`` / ``max_K f`` and is held fixed.  The returned
    ``per_pass`` holds the four envelope reports (lower transform first).
    """
    k = as_mask(k_mask, f_on_k.dims)
    if not k.any():
        raise ValueError("K is empty")
    if p is None:
        p = EnvelopeParams(lam=lam)
    elif p.lam != lam:
        p = p.replace(lam=lam)
    if big_m is None:
        big_m = default_big_m(f_on_k, k, lam)
    h = f_on_k.spacing
    lo_ext = extend_masked(f_on_k, k, big_m, "min_K")
    hi_ext = extend_masked(f_on_k, k, -big_m, "max_K")
    frozen = frame_mask(lo_ext.dims)
    lower, r_lo = _opening(lo_ext.values, h, p, frozen)
    upper, r_hi = _closing(hi_ext.values, h, p, frozen)
    avg = 0.5 * (lower + upper)
    return TransformResult(crop(lo_ext.with_values(avg), 1), r_lo + r_hi)


def global_transform_on_padded(f: ScalarField, pad_cells: int, pad_value: float,
                               p: EnvelopeParams) -> TransformResult:
    """Pad by ``pad_cells`` cells of ``pad_value``, transform the whole padded
    grid (lower or upper per ``p.direction``) and crop back to ``f``'s grid."""
    if pad_cells < 1:
        raise ValueError("pad_cells must be >= 1")
    ext = pad_frame(f, FrameSpec(pad_cells, float(pad_value)))
    op = _opening if p.direction == "lower" else _closing
    out, reports = op(ext.values, f.spacing, p)
    return TransformResult(crop(ext.with_values(out), pad_cells), reports)

