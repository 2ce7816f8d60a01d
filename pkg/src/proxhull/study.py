"""Convergence studies against the closed-form prototypes.

Four problems are available:

``ex1d``
    double well sampled on ``[-2, 2]``; local lower transform with a min frame.
``ex2d``
    ``(|x| - 1)^2`` on the closed radius-2 disk, zero elsewhere in
    ``[-2.5, 2.5]^2``; local lower transform with a min frame.
``ex1d_inf`` / ``ex2d_inf``
    the same data on the open domain, extended by a constant ``big_m`` over a
    margin of width ``a``; the lower transform is taken over the whole padded
    grid and compared on the original domain with the unbounded-extension
    closed form.

Each ``(h, lambda, scheme)`` triple yields one row ``h, lambda, scheme, m,
linf_error``.  Convex-scheme rows that exceed the time limit print ``-``.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .convex_baseline import BaselineParams, lower_transform_convex
from .grid_field import FrameSpec, ScalarField, crop, pad_frame
from .moreau import EnvelopeParams
from .oracles import (
    double_well,
    grid_coords,
    lower_transform_1d_exact,
    lower_transform_1d_inf_exact,
    lower_transform_2d_exact,
    lower_transform_2d_inf_exact,
)
from .transforms import local_lower_transform, lower_transform

__all__ = ["StudyConfig", "StudyRow", "Problem", "build_problem", "run_row", "run_study", "write_rows"]

ORACLES = ("ex1d", "ex2d", "ex1d_inf", "ex2d_inf")
SCHEMES = ("moreau", "convex")
COLUMNS = ("h", "lambda", "scheme", "m", "linf_error")


@dataclass
class StudyConfig:
    hs: list
    lams: list
    scheme: str = "moreau"
    oracle: str = "ex1d"
    tol: float = 1e-7
    output: str | None = None
    extension: float | None = None
    big_m: float = 1e3
    convex_time_limit: float = 300.0
    threads: int = 1

    def __post_init__(self):
        if not self.hs or not self.lams:
            raise ValueError("h and lambda lists must be non-empty")
        if any(not h > 0 for h in self.hs):
            raise ValueError("grid sizes must be positive")
        if any(not lam > 0 for lam in self.lams):
            raise ValueError("lambda values must be positive")
        if self.scheme not in SCHEMES + ("both",):
            raise ValueError(f"scheme must be moreau, convex or both, got {self.scheme!r}")
        if self.oracle not in ORACLES:
            raise ValueError(f"oracle must be one of {ORACLES}, got {self.oracle!r}")

    @property
    def schemes(self):
        return SCHEMES if self.scheme == "both" else (self.scheme,)


@dataclass
class StudyRow:
    h: float
    lam: float
    scheme: str
    m: int | None
    linf_error: float | None
    seconds: float = 0.0

    def cells(self):
        if self.m is None:
            return [repr(self.h), repr(self.lam), self.scheme, "-", "-"]
        return [repr(self.h), repr(self.lam), self.scheme, str(self.m), f"{self.linf_error:.7g}"]


@dataclass
class Problem:
    """Sampled data, the closed form on the same grid, and where to compare."""

    field: ScalarField
    reference: np.ndarray
    mask: np.ndarray
    framed: bool
    extra: dict = field(default_factory=dict)


def _nodes(lo: float, length: float, h: float) -> np.ndarray:
    return lo + h * np.arange(int(round(length / h)) + 1)


def build_problem(oracle: str, h: float, lam: float, extension: float | None = None,
                  big_m: float = 1e3) -> Problem:
    eps = 1e-9 * h
    if oracle == "ex1d":
        x = _nodes(-2.0, 4.0, h)
        f = ScalarField(double_well(x), h)
        return Problem(f, lower_transform_1d_exact(x, lam), np.ones(x.shape, bool), True)
    if oracle == "ex2d":
        pts = grid_coords((int(round(5.0 / h)) + 1,) * 2, h, (-2.5, -2.5))
        r = np.hypot(pts[..., 0], pts[..., 1])
        f = ScalarField(np.where(r <= 2.0 + eps, (r - 1.0) ** 2, 0.0), h)
        return Problem(f, lower_transform_2d_exact(r, lam), np.ones(r.shape, bool), True)
    if oracle == "ex1d_inf":
        a = 1.0 / (2.0 * lam) if extension is None else extension
        x = _nodes(-2.0 - a, 4.0 + 2 * a, h)
        inside = np.abs(x) < 2.0 - eps
        f = ScalarField(np.where(inside, double_well(x), big_m), h)
        ref = np.zeros(x.shape)
        ref[inside] = lower_transform_1d_inf_exact(x[inside], lam)
        return Problem(f, ref, inside, False, {"a": a})
    if oracle == "ex2d_inf":
        a = 1.0 if extension is None else extension
        n = int(round((4.0 + 2 * a) / h)) + 1
        pts = grid_coords((n, n), h, (-2.0 - a, -2.0 - a))
        r = np.hypot(pts[..., 0], pts[..., 1])
        inside = r < 2.0 - eps
        f = ScalarField(np.where(inside, (r - 1.0) ** 2, big_m), h)
        return Problem(f, lower_transform_2d_inf_exact(r, lam), inside, False, {"a": a})
    raise ValueError(f"unknown oracle {oracle!r}")


def run_row(cfg: StudyConfig, h: float, lam: float, scheme: str) -> StudyRow:
    prob = build_problem(cfg.oracle, h, lam, cfg.extension, cfg.big_m)
    start = time.perf_counter()
    if scheme == "moreau":
        p = EnvelopeParams(lam=lam, tol=cfg.tol, threads=cfg.threads)
        res = (local_lower_transform if prob.framed else lower_transform)(prob.field, p)
        out, m = res.field, res.total_iterations
    else:
        bp = BaselineParams(tol=cfg.tol, time_limit=cfg.convex_time_limit)
        data = pad_frame(prob.field, FrameSpec(1, "min")) if prob.framed else prob.field
        res = lower_transform_convex(data, lam, bp)
        if not res.per_pass[0].converged:
            return StudyRow(h, lam, scheme, None, None, time.perf_counter() - start)
        out = crop(res.field, 1) if prob.framed else res.field
        m = res.total_iterations
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(out.values - prob.reference)[prob.mask]))
    return StudyRow(h, lam, scheme, m, err, elapsed)


def run_study(cfg: StudyConfig, progress=None) -> list:
    rows = []
    for lam in cfg.lams:
        for h in cfg.hs:
            for scheme in cfg.schemes:
                row = run_row(cfg, h, lam, scheme)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def write_rows(rows, out=None) -> str:
    """Render rows as CSV; also write them to ``out`` (a path) when given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(row.cells())
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text

