"""Reading and writing fields: CSV (with header or JSON sidecar) and PGM."""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .grid_field import ScalarField

__all__ = ["read_csv", "write_csv", "read_pgm", "write_pgm", "read_field", "write_field",
           "write_json", "jsonable"]

_HEADER = re.compile(r"#\s*dims\s*=\s*([0-9x]+)\s*,\s*spacing\s*=\s*(\S+)")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def read_csv(path) -> ScalarField:
    """Read a CSV field.

    The first line may be ``# dims=d1xd2x..., spacing=h``.  Without it, a
    sidecar ``<file>.json`` holding ``{"dims": [...], "spacing": h}`` is
    used; failing both, the rows of the file give a 1-D or 2-D shape with
    unit spacing.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    dims = spacing = None
    if lines and lines[0].lstrip().startswith("#"):
        m = _HEADER.match(lines[0].strip())
        if m is None:
            raise ValueError(f"{path}: malformed header {lines[0]!r}")
        dims = tuple(int(d) for d in m.group(1).split("x"))
        spacing = float(m.group(2))
        lines = lines[1:]
    elif _sidecar(path).exists():
        meta = json.loads(_sidecar(path).read_text())
        dims = tuple(int(d) for d in meta["dims"])
        spacing = float(meta["spacing"])
    rows = [ln for ln in lines if ln.strip()]
    try:
        data = [[float(tok) for tok in ln.split(",")] for ln in rows]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    flat = np.array([v for row in data for v in row], dtype=np.float64)
    if dims is None:
        dims = (flat.size,) if len(data) == 1 else (len(data), len(data[0]))
        spacing = 1.0
    if flat.size != math.prod(dims):
        raise ValueError(f"{path}: {flat.size} values for dims {dims}")
    return ScalarField(flat.reshape(dims), spacing)


def write_csv(path, f: ScalarField) -> None:
    dims = "x".join(str(d) for d in f.dims)
    rows = f.values.reshape(-1, f.dims[-1])
    with open(path, "w") as fh:
        fh.write(f"# dims={dims}, spacing={f.spacing!r}\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def _pgm_tokens(data: bytes, count: int, start: int = 0):
    """Yield ``count`` whitespace separated header tokens, skipping comments."""
    tokens = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated PGM header")
        tokens.append(data[i:j])
        i = j
    return tokens, i


def read_pgm(path) -> ScalarField:
    """Read a P2 or P5 greymap, rescaled to the [0, 255] range."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if magic == b"P5":
        pos += 1  # single whitespace byte before raster
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        raster = np.frombuffer(data, dtype=dtype, count=w * h, offset=pos)
    elif magic == b"P2":
        raster = np.array(data[pos:].split()[: w * h], dtype=np.int64)
    else:
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    if raster.size != w * h:
        raise ValueError(f"{path}: expected {w * h} pixels, found {raster.size}")
    img = raster.reshape(h, w).astype(np.float64)
    if maxval != 255:
        img *= 255.0 / maxval
    return ScalarField(img, 1.0)


def write_pgm(path, f: ScalarField, binary: bool = True) -> None:
    """Write a 2-D field as an 8-bit greymap (values rounded and clipped to [0, 255])."""
    if f.ndim != 2:
        raise ValueError("PGM output needs a 2-D field")
    img = np.clip(np.rint(f.values), 0, 255).astype(np.uint8)
    h, w = img.shape
    if binary:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode())
            fh.write(img.tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(f"P2\n{w} {h}\n255\n")
            for row in img:
                fh.write(" ".join(str(int(v)) for v in row))
                fh.write("\n")


def read_field(path) -> ScalarField:
    """Dispatch on suffix: ``.pgm`` images, anything else CSV."""
    return read_pgm(path) if str(path).lower().endswith(".pgm") else read_csv(path)


def write_field(path, f: ScalarField) -> None:
    if str(path).lower().endswith(".pgm"):
        write_pgm(path, f)
    else:
        write_csv(path, f)


def jsonable(obj):
    """Replace infinities by strings and numpy scalars by Python ones."""
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    return obj


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n")
