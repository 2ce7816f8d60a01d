"""Scalar fields on uniform grids, binary masks and boundary extensions.

A :class:`ScalarField` is an immutable n-D float64 array together with its
grid step ``spacing``.  Masks are plain boolean numpy arrays of the same
shape.  Every helper here is a pure function returning a new field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ScalarField",
    "FrameSpec",
    "as_mask",
    "oscillation",
    "pad_frame",
    "crop",
    "extend_masked",
    "indicator_field",
    "default_sentinel",
    "characteristic_field",
]


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Dense real samples on a uniform grid of step ``spacing``.

    ``values`` is stored as a read-only C-contiguous float64 copy.  Infinite
    values are rejected; unbounded extensions use a finite sentinel.
    """

    values: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.size == 0:
            raise ValueError("ScalarField needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ScalarField values must be finite")
        spacing = float(self.spacing)
        if not spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "spacing", spacing)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def with_values(self, values) -> "ScalarField":
        """Same spacing, new samples."""
        return ScalarField(values, self.spacing)

    def __neg__(self) -> "ScalarField":
        return ScalarField(-self.values, self.spacing)

    def __repr__(self):
        return f"ScalarField(dims={self.dims}, spacing={self.spacing})"


@dataclass(frozen=True)
class FrameSpec:
    """Width of a boundary frame and how it is filled.

    ``fill`` is ``"min"``, ``"max"`` or a number (constant fill).
    """

    width: int = 1
    fill: Union[str, float] = "min"

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("frame width must be non-negative")
        if isinstance(self.fill, str) and self.fill not in ("min", "max"):
            raise ValueError(f"unknown frame fill {self.fill!r}")


def as_mask(mask, dims=None) -> np.ndarray:
    """Coerce to a boolean array, optionally checking its shape."""
    m = np.asarray(mask, dtype=bool)
    if dims is not None and m.shape != tuple(dims):
        raise ValueError(f"mask shape {m.shape} does not match field dims {tuple(dims)}")
    return m


def oscillation(f: ScalarField) -> float:
    """max(f) - min(f)."""
    v = f.values
    if v.size == 0:
        raise ValueError("oscillation of an empty field")
    return float(v.max() - v.min())


def _fill_value(values: np.ndarray, fill) -> float:
    if fill == "min":
        return float(values.min())
    if fill == "max":
        return float(values.max())
    return float(fill)


def pad_frame(f: ScalarField, spec: FrameSpec = FrameSpec()) -> ScalarField:
    """Surround ``f`` by a frame of ``spec.width`` cells on every side."""
    if spec.width == 0:
        return f
    c = _fill_value(f.values, spec.fill)
    return f.with_values(np.pad(f.values, spec.width, mode="constant", constant_values=c))


def crop(f: ScalarField, width: int) -> ScalarField:
    """Remove ``width`` cells from both ends of every axis (inverse of pad_frame)."""
    if width < 0:
        raise ValueError("crop width must be non-negative")
    if width == 0:
        return f
    if any(d <= 2 * width for d in f.dims):
        raise ValueError(f"cannot crop {width} cells from dims {f.dims}")
    sl = tuple(slice(width, d - width) for d in f.dims)
    return f.with_values(f.values[sl])


def extend_masked(f_on_k: ScalarField, k_mask, interior_fill: float,
                  frame_fill: str = "min_K") -> ScalarField:
    """Big-M auxiliary extension of data known only on ``K``.

    Returns a field one cell larger on each side: ``f`` on K,
    ``interior_fill`` on the rest of the grid, and ``min_K f`` (or
    ``max_K f``) on the width-1 frame.
    """
    k = as_mask(k_mask, f_on_k.dims)
    if not k.any():
        raise ValueError("K is empty; inf_K f is undefined")
    known = f_on_k.values[k]
    if frame_fill == "min_K":
        c = float(known.min())
    elif frame_fill == "max_K":
        c = float(known.max())
    else:
        raise ValueError(f"frame_fill must be 'min_K' or 'max_K', got {frame_fill!r}")
    inner = np.where(k, f_on_k.values, float(interior_fill))
    return f_on_k.with_values(np.pad(inner, 1, mode="constant", constant_values=c))


def default_sentinel(dims, lam: float, spacing: float = 1.0, base: float = 0.0) -> float:
    """Finite stand-in for +inf that no quadratic penalty on the grid can beat."""
    span = spacing * float(sum(dims))
    return float(base) + lam * span * span + 1.0


def indicator_field(c_mask, lam: float, sentinel: float | None = None,
                    spacing: float = 1.0) -> ScalarField:
    """``lam * i_C``: zero on C, ``sentinel`` elsewhere.

    The lower Moreau envelope of the result with module ``lam`` equals
    ``lam`` times the squared Euclidean distance to C.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    c = as_mask(c_mask)
    if not c.any():
        raise ValueError("indicator of an empty set")
    if sentinel is None:
        sentinel = default_sentinel(c.shape, lam, spacing)
    diam2 = spacing * spacing * float(sum((d - 1) ** 2 for d in c.shape))
    if sentinel < lam * diam2:
        raise ValueError("sentinel too small: it could win the infimum")
    return ScalarField(np.where(c, 0.0, float(sentinel)), spacing)


def characteristic_field(k_mask, spacing: float = 1.0) -> ScalarField:
    """1 on K, 0 elsewhere."""
    k = as_mask(k_mask)
    return ScalarField(k.astype(np.float64), spacing)
