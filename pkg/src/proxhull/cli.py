"""Command-line front end.

Every subcommand reads fields from CSV or PGM files, writes its result in
the format implied by the output suffix, and (except ``study``) writes a
JSON report next to it.  On failure, files written so far are removed and
the exit status is non-zero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (
    NoiseSpec,
    denoise,
    inpaint,
    intersection_filter,
    intersection_points,
    medial_axis_map,
    salt_pepper,
    suplevel_mask,
)
from .convex_baseline import BaselineParams, lower_transform_convex, upper_transform_convex
from .grid_field import FrameSpec, ScalarField, crop, indicator_field, pad_frame
from .io import jsonable, read_field, write_field, write_json
from .moreau import EnvelopeParams, moreau_envelope
from .study import StudyConfig, run_study, write_rows
from .transforms import (
    average_transform,
    default_big_m,
    local_lower_transform,
    local_upper_transform,
    lower_transform,
    upper_transform,
)

THREADS_ENV = "PROXHULL_THREADS"


class CliError(Exception):
    pass


class _Outputs:
    """Tracks written files so a failed run can clean up after itself."""

    def __init__(self):
        self.paths = []

    def field(self, path, f: ScalarField):
        self.paths.append(Path(path))
        write_field(path, f)

    def json(self, path, payload):
        self.paths.append(Path(path))
        write_json(path, payload)

    def text(self, path, text: str):
        self.paths.append(Path(path))
        Path(path).write_text(text)

    def discard(self):
        for p in self.paths:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise CliError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise CliError("thread count must be >= 1")
    return n


def _parse_stop(text: str) -> dict:
    text = text.strip()
    if text == "exact":
        return {"stop": "exact"}
    key, sep, val = text.partition("=")
    try:
        if key in ("tol", "tolerance") and sep:
            return {"stop": "tolerance", "tol": float(val)}
        if key in ("iters", "iterations") and sep:
            return {"stop": "iterations", "iterations": int(val)}
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad stop rule {text!r}; use tol=EPS, iters=N or exact")


def _float_list(text: str) -> list:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _load(path, spacing=None) -> ScalarField:
    try:
        f = read_field(path)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return f if spacing is None else ScalarField(f.values, spacing)


def _load_mask(path, dims) -> np.ndarray:
    m = _load(path).values != 0
    if m.shape != tuple(dims):
        raise CliError(f"mask {path} has dims {m.shape}, image has {tuple(dims)}")
    return m


def _report_path(args) -> Path:
    if args.report:
        return Path(args.report)
    out = Path(args.output)
    return out.with_name(out.stem + ".report.json")


def _envelope_params(args, lam=None) -> EnvelopeParams:
    stop = args.stop if getattr(args, "stop", None) else {"stop": "tolerance", "tol": 1e-7}
    return EnvelopeParams(lam=args.lam if lam is None else lam, threads=_threads(args), **stop)


def _field_summary(f: ScalarField) -> dict:
    return {"dims": list(f.dims), "spacing": f.spacing,
            "min": float(f.values.min()), "max": float(f.values.max())}


def cmd_envelope(args, out: _Outputs) -> int:
    f = _load(args.input, args.spacing)
    p = _envelope_params(args).replace(direction=args.direction)
    g, rep = moreau_envelope(f, p)
    out.field(args.output, g)
    out.json(_report_path(args), {"command": "envelope", "direction": args.direction,
                                   "lambda": p.lam, "stop": p.stop, **rep.as_dict(),
                                   "successive_diffs": rep.successive_diffs,
                                   "output": _field_summary(g)})
    return 0


def _convex_transform(kind, f, lam, args):
    bp = BaselineParams(tol=args.stop.get("tol", 1e-7) if args.stop else 1e-7)
    if kind in ("lower", "upper"):
        fn = lower_transform_convex if kind == "lower" else upper_transform_convex
        return fn(f, lam, bp)
    fill = "min" if kind == "local-lower" else "max"
    fn = lower_transform_convex if kind == "local-lower" else upper_transform_convex
    res = fn(pad_frame(f, FrameSpec(1, fill)), lam, bp)
    res.field = crop(res.field, 1)
    return res


def cmd_transform(args, out: _Outputs) -> int:
    f = _load(args.input, args.spacing)
    p = _envelope_params(args)
    payload = {"command": "transform", "kind": args.kind, "scheme": args.scheme, "lambda": p.lam}
    if args.kind == "average":
        if args.scheme != "moreau":
            raise CliError("the average transform is only available with --scheme moreau")
        if not args.known:
            raise CliError("transform average needs --known MASK")
        k = _load_mask(args.known, f.dims)
        big_m = args.big_m if args.big_m is not None else default_big_m(f, k, p.lam)
        res = average_transform(f, k, p.lam, big_m, p)
        payload["M"] = big_m
    elif args.scheme == "convex":
        res = _convex_transform(args.kind, f, p.lam, args)
    else:
        fn = {"lower": lower_transform, "upper": upper_transform,
              "local-lower": local_lower_transform, "local-upper": local_upper_transform}[args.kind]
        res = fn(f, p)
    out.field(args.output, res.field)
    payload.update(total_iterations=res.total_iterations,
                   passes=[r.as_dict() for r in res.per_pass], output=_field_summary(res.field))
    out.json(_report_path(args), payload)
    return 0


def _binary_set(args):
    f = _load(args.input, args.spacing)
    k = f.values != 0
    if args.invert:
        k = ~k
    return f, k


def cmd_medial_axis(args, out: _Outputs) -> int:
    f, k = _binary_set(args)
    if not k.any():
        raise CliError("K is empty: the distance to it is undefined")
    p1 = EnvelopeParams(lam=1.0, threads=_threads(args))
    dist2, _ = moreau_envelope(indicator_field(k, 1.0, spacing=f.spacing), p1)
    m = medial_axis_map(dist2, args.lam, not args.no_scale_factor, _envelope_params(args))
    out.field(args.output, m)
    payload = {"command": "medial-axis", "lambda": args.lam,
               "scale_factor": not args.no_scale_factor, "output": _field_summary(m)}
    if args.threshold is not None:
        mask = suplevel_mask(m, args.threshold)
        payload["threshold"] = args.threshold
        payload["suplevel_cells"] = int(mask.sum())
        if args.mask_output:
            out.field(args.mask_output, m.with_values(np.where(mask, 255.0, 0.0)))
    out.json(_report_path(args), payload)
    return 0


def cmd_intersect(args, out: _Outputs) -> int:
    f, k = _binary_set(args)
    p = _envelope_params(args)
    resp = intersection_filter(k, args.lam, p, f.spacing, args.inner_lambda)
    out.field(args.output, resp)
    marks = intersection_points(k, args.lam, args.threshold, p, f.spacing, args.inner_lambda) \
        if k.any() else np.zeros(f.dims, bool)
    out.json(_report_path(args), {
        "command": "intersect", "lambda": args.lam,
        "inner_lambda": args.lam if args.inner_lambda is None else args.inner_lambda,
        "threshold": args.threshold,
        "markers": [[int(i) for i in idx] for idx in np.argwhere(marks)],
        "output": _field_summary(resp)})
    return 0


def cmd_inpaint(args, out: _Outputs) -> int:
    f = _load(args.input, args.spacing)
    damaged = _load_mask(args.damaged, f.dims)
    ref = _load(args.reference, args.spacing) if args.reference else None
    if ref is not None and ref.dims != f.dims:
        raise CliError(f"reference dims {ref.dims} differ from image dims {f.dims}")
    restored, rep = inpaint(f, ~damaged, args.lam, args.big_m, _envelope_params(args), ref)
    out.field(args.output, restored)
    out.json(_report_path(args), {"command": "inpaint", "damaged_cells": int(damaged.sum()),
                                   **rep.as_dict()})
    return 0


def cmd_denoise(args, out: _Outputs) -> int:
    clean = _load(args.input, args.spacing)
    noisy, k = salt_pepper(clean, NoiseSpec(args.density, args.seed))
    if args.noisy_output:
        out.field(args.noisy_output, noisy)
    restored, rep = denoise(noisy, k, args.lam, args.big_m, _envelope_params(args), clean)
    out.field(args.output, restored)
    payload = {"command": "denoise", "density": args.density, "seed": args.seed,
               "corrupted_cells": int((~k).sum()), **rep.as_dict()}
    out.json(_report_path(args), payload)
    print(json.dumps(jsonable(payload), sort_keys=True))
    return 0


def cmd_study(args, out: _Outputs) -> int:
    cfg = StudyConfig(hs=args.h, lams=args.lam, scheme=args.scheme, oracle=args.oracle,
                      tol=args.tol, output=args.output, extension=args.extension,
                      big_m=args.big_m, convex_time_limit=args.time_limit,
                      threads=_threads(args))
    text = write_rows(run_study(cfg))
    if cfg.output:
        out.text(cfg.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _common(sp, output=True):
    sp.add_argument("--threads", type=int, default=None,
                    help=f"worker threads for envelope sweeps (default: ${THREADS_ENV} or 1)")
    if output:
        sp.add_argument("--input", "-i", required=True, help="input field (.csv or .pgm)")
        sp.add_argument("--output", "-o", required=True, help="output field (.csv or .pgm)")
        sp.add_argument("--report", help="JSON report path (default: <output stem>.report.json)")
        sp.add_argument("--spacing", type=float, default=None,
                        help="override the grid spacing read from the input")


def _lam(sp, default=1.0):
    sp.add_argument("--lambda", dest="lam", type=float, default=default, help="curvature module")


def _stop(sp):
    sp.add_argument("--stop", type=_parse_stop, default=None,
                    help="tol=EPS (default tol=1e-7), iters=N or exact")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proxhull", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("envelope", help="lower or upper Moreau envelope")
    sp.add_argument("direction", choices=("lower", "upper"))
    _common(sp); _lam(sp); _stop(sp)
    sp.set_defaults(func=cmd_envelope)

    sp = sub.add_parser("transform", help="compensated convex transforms")
    sp.add_argument("kind", choices=("lower", "upper", "local-lower", "local-upper", "average"))
    sp.add_argument("--scheme", choices=("moreau", "convex"), default="moreau")
    sp.add_argument("--known", help="mask of known cells (non-zero = known), for 'average'")
    sp.add_argument("--big-m", type=float, default=None, help="auxiliary constant M for 'average'")
    _common(sp); _lam(sp); _stop(sp)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("medial-axis", help="multiscale medial axis map of a binary image")
    sp.add_argument("--invert", action="store_true", help="take K as the zero cells instead")
    sp.add_argument("--no-scale-factor", action="store_true", help="omit the (1 + lambda) factor")
    sp.add_argument("--threshold", type=float, default=None, help="suplevel threshold")
    sp.add_argument("--mask-output", help="write the suplevel set as a 0/255 field here")
    _common(sp); _lam(sp); _stop(sp)
    sp.set_defaults(func=cmd_medial_axis)

    sp = sub.add_parser("intersect", help="intersection filter of a binary curve image")
    sp.add_argument("--invert", action="store_true", help="take K as the zero cells instead")
    sp.add_argument("--inner-lambda", type=float, default=None,
                    help="module of the inner upper transform (default: --lambda)")
    sp.add_argument("--threshold", type=float, default=0.5, help="marker threshold")
    _common(sp); _lam(sp, 5.0); _stop(sp)
    sp.set_defaults(func=cmd_intersect)

    sp = sub.add_parser("inpaint", help="restore damaged cells with the average transform")
    sp.add_argument("--damaged", required=True, help="mask of damaged cells (non-zero = damaged)")
    sp.add_argument("--reference", help="undamaged image for PSNR")
    sp.add_argument("--big-m", type=float, default=None)
    _common(sp); _lam(sp, 5.0); _stop(sp)
    sp.set_defaults(func=cmd_inpaint)

    sp = sub.add_parser("denoise", help="salt & pepper corruption and restoration")
    sp.add_argument("--seed", type=int, required=True, help="64-bit noise seed")
    sp.add_argument("--density", type=float, default=0.7)
    sp.add_argument("--noisy-output", help="also write the corrupted image")
    sp.add_argument("--big-m", type=float, default=None)
    _common(sp); _lam(sp, 15.0); _stop(sp)
    sp.set_defaults(func=cmd_denoise)

    sp = sub.add_parser("study", help="error and iteration tables against closed forms")
    sp.add_argument("--oracle", choices=("ex1d", "ex2d", "ex1d_inf", "ex2d_inf"), default="ex1d")
    sp.add_argument("--h", type=_float_list, default=[0.1, 0.05, 0.01], help="comma-separated")
    sp.add_argument("--lambda", dest="lam", type=_float_list, default=[1.0, 2.0],
                    help="comma-separated")
    sp.add_argument("--scheme", choices=("moreau", "convex", "both"), default="moreau")
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.add_argument("--extension", type=float, default=None,
                    help="margin a for the *_inf oracles (default 1/(2 lambda) in 1-D, 1 in 2-D)")
    sp.add_argument("--big-m", type=float, default=1e3)
    sp.add_argument("--time-limit", type=float, default=300.0,
                    help="seconds per convex-scheme row before it is reported as '-'")
    sp.add_argument("--output", "-o", default=None, help="CSV path (default: stdout)")
    _common(sp, output=False)
    sp.set_defaults(func=cmd_study)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Outputs()
    try:
        return args.func(args, out)
    except (CliError, ValueError, OSError) as exc:
        out.discard()
        print(f"proxhull {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except BaseException:
        out.discard()
        raise


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
