"""File formats: PGM images, CSV grids, binary64 grids and fields, sample sets, reports."""
from __future__ import annotations

import csv
import re
import warnings

import numpy as np

from .recovery import SampleSet
from .resample import DisplacementField

__all__ = [
    "FormatError",
    "read_pgm",
    "write_pgm",
    "read_grid_csv",
    "write_grid_csv",
    "read_raw",
    "write_raw",
    "read_field",
    "write_field",
    "read_samples",
    "write_samples",
    "read_mask",
    "write_mask",
    "read_report",
    "write_report",
]


class FormatError(ValueError):
    """Malformed input file; ``offset`` is the byte position of the problem."""

    def __init__(self, msg: str, offset: int | None = None):
        super().__init__(msg if offset is None else f"{msg} (at byte {offset})")
        self.offset = offset


_WS = b" \t\r\n\v\f"


def _pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[tuple[int, int]], int]:
    """Read ``count`` integer header tokens, skipping comments; return (value, offset)."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and (data[pos] in _WS or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise FormatError("unexpected end of file in header", pos)
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        tok = data[start:pos]
        if not tok.isdigit():
            raise FormatError(f"expected an integer, found {tok[:16]!r}", start)
        out.append((int(tok), start))
    return out, pos


def read_pgm(path, return_maxval: bool = False):
    """Read a P2 (ASCII) or P5 (binary) PGM file as a float array.

    Raises :class:`FormatError` with the byte offset of the first problem;
    no partial image is ever returned.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2:
        raise FormatError("file too short for a PGM header", len(data))
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"not a PGM file (magic {magic!r})", 0)
    toks, pos = _pgm_tokens(data, 3, 2)
    (w, ow), (h, oh), (maxval, om) = toks
    if w < 1:
        raise FormatError("width must be positive", ow)
    if h < 1:
        raise FormatError("height must be positive", oh)
    if not 1 <= maxval <= 65535:
        raise FormatError(f"maxval {maxval} outside [1, 65535]", om)
    count = w * h
    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WS:
            raise FormatError("missing whitespace after maxval", pos)
        pos += 1
        size = 1 if maxval < 256 else 2
        need = count * size
        if len(data) - pos < need:
            raise FormatError(f"pixel data truncated: need {need} bytes, have {len(data) - pos}",
                              len(data))
        dtype = np.uint8 if size == 1 else np.dtype(">u2")
        pix = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
        if pix.max(initial=0) > maxval:
            bad = int(np.argmax(pix > maxval))
            raise FormatError(f"sample {pix[bad]} exceeds maxval {maxval}", pos + bad * size)
    else:
        found = list(re.finditer(rb"[^ \t\r\n\v\f]+", data[pos:]))
        if len(found) < count:
            raise FormatError(f"pixel data truncated: {len(found)} of {count} samples", len(data))
        if len(found) > count:
            raise FormatError("extra data after pixel samples", pos + found[count].start())
        pix = np.empty(count, dtype=np.int64)
        for i, m in enumerate(found):
            tok = m.group()
            if not tok.isdigit() or int(tok) > maxval:
                raise FormatError(f"invalid sample {tok[:16]!r} for maxval {maxval}", pos + m.start())
            pix[i] = int(tok)
    img = pix.reshape(h, w).astype(float)
    return (img, maxval) if return_maxval else img


def write_pgm(img, path, maxval: int | None = None, binary: bool = True) -> None:
    """Write a grayscale image as PGM.

    Values are rounded to integers and clipped to ``[0, maxval]`` with a
    warning when that changes them.  ``maxval`` defaults to 255 when the
    rounded data fit, else 65535.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("cannot write non-finite samples to PGM")
    rounded = np.round(img)
    if maxval is None:
        maxval = 255 if rounded.max() <= 255 else 65535
    if not 1 <= maxval <= 65535:
        raise ValueError(f"maxval must lie in [1, 65535], got {maxval}")
    out = np.clip(rounded, 0, maxval)
    n_clip = int(np.sum(rounded != out))
    if n_clip:
        warnings.warn(f"PGM write clipped {n_clip} samples to [0, {maxval}]", RuntimeWarning,
                      stacklevel=2)
    elif np.any(rounded != img):
        warnings.warn("PGM write rounded non-integer samples", RuntimeWarning, stacklevel=2)
    h, w = img.shape
    pix = out.astype(np.int64)
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n{maxval}\n".encode())
            fh.write(pix.astype(np.uint8 if maxval < 256 else ">u2").tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n{maxval}\n".encode())
            for row in pix:
                fh.write((" ".join(map(str, row)) + "\n").encode())


def _fmt(v) -> str:
    if isinstance(v, complex) or np.iscomplexobj(v):
        return repr(complex(v)).strip("()")
    return repr(float(v))


def write_grid_csv(grid, path) -> None:
    """CSV grid: first line ``H,W`` then ``H`` rows of ``W`` values (complex allowed)."""
    grid = np.asarray(grid)
    if grid.ndim == 1:
        grid = grid[None, :]
    if grid.ndim != 2:
        raise ValueError("CSV grids are two-dimensional")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(grid.shape)
        for row in grid:
            wr.writerow([_fmt(v) for v in row])


def read_grid_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError("empty CSV grid", 0)
    try:
        h, w = (int(v) for v in rows[0])
    except ValueError:
        raise FormatError(f"first line must be 'H,W', got {','.join(rows[0])!r}", 0) from None
    body = [r for r in rows[1:] if r]
    if len(body) != h or any(len(r) != w for r in body):
        raise FormatError(f"grid body does not match declared shape {h}x{w}")
    try:
        vals = [[complex(v.strip()) for v in r] for r in body]
    except ValueError as exc:
        raise FormatError(f"bad grid value: {exc}") from None
    arr = np.array(vals, dtype=complex).reshape(h, w)
    if np.all(arr.imag == 0):
        arr = arr.real.copy()
    if not np.all(np.isfinite(arr)):
        raise FormatError("grid contains non-finite values")
    return arr


def write_raw(grid, path) -> None:
    """Raw binary64 grid: ASCII header ``H,W,C\\n`` then little-endian doubles.

    ``C`` is 1 for real and 2 for complex (interleaved real, imaginary) data.
    """
    grid = np.asarray(grid)
    if grid.ndim == 1:
        grid = grid[None, :]
    h, w = grid.shape
    if np.iscomplexobj(grid):
        body = np.stack([grid.real, grid.imag], axis=-1)
        c = 2
    else:
        body, c = grid, 1
    with open(path, "wb") as fh:
        fh.write(f"{h},{w},{c}\n".encode())
        fh.write(np.ascontiguousarray(body, dtype="<f8").tobytes())


def _raw_header(data: bytes, fields: int):
    end = data.find(b"\n")
    if end < 0:
        raise FormatError("missing header line", 0)
    try:
        dims = [int(v) for v in data[:end].decode("ascii").split(",")]
    except (UnicodeDecodeError, ValueError):
        raise FormatError("header must be comma-separated integers", 0) from None
    if len(dims) != fields or min(dims) < 1:
        raise FormatError(f"header must hold {fields} positive integers", 0)
    return dims, end + 1


def read_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    (h, w, c), off = _raw_header(data, 3)
    if c not in (1, 2):
        raise FormatError(f"channel count must be 1 or 2, got {c}", 0)
    need = h * w * c * 8
    if len(data) - off != need:
        raise FormatError(f"payload holds {len(data) - off} bytes, expected {need}", len(data))
    arr = np.frombuffer(data, dtype="<f8", offset=off).reshape(h, w, c).astype(float)
    return arr[..., 0].copy() if c == 1 else arr[..., 0] + 1j * arr[..., 1]


def write_field(field: DisplacementField, path) -> None:
    """Displacement field: header ``H,W\\n`` then ``(dy, dx)`` binary64 pairs."""
    h, w = field.shape
    body = np.stack([field.dy, field.dx], axis=-1).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(f"{h},{w}\n".encode())
        fh.write(body.tobytes())


def read_field(path) -> DisplacementField:
    with open(path, "rb") as fh:
        data = fh.read()
    (h, w), off = _raw_header(data, 2)
    need = h * w * 16
    if len(data) - off != need:
        raise FormatError(f"field payload holds {len(data) - off} bytes, expected {need}", len(data))
    arr = np.frombuffer(data, dtype="<f8", offset=off).reshape(h, w, 2)
    try:
        return DisplacementField(arr[..., 0].copy(), arr[..., 1].copy())
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_samples(samples: SampleSet, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        if len(samples.shape) == 1:
            wr.writerow(["index", "value"])
            for (i,), v in zip(samples.positions, samples.values):
                wr.writerow([int(i), repr(float(v))])
        else:
            wr.writerow(["row", "col", "value"])
            for (r, c), v in zip(samples.positions, samples.values):
                wr.writerow([int(r), int(c), repr(float(v))])


def read_samples(path, shape) -> SampleSet:
    """Read ``index,value`` (1D) or ``row,col,value`` (2D) samples for a lattice."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise FormatError("empty sample file", 0)
    head = [c.strip().lower() for c in rows[0]]
    if head not in (["index", "value"], ["row", "col", "value"]):
        raise FormatError(f"sample header must be 'index,value' or 'row,col,value', got {rows[0]}", 0)
    npos = len(head) - 1
    try:
        pos = np.array([[int(v) for v in r[:npos]] for r in rows[1:]], dtype=np.int64)
        vals = np.array([float(r[npos]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad sample row: {exc}") from None
    shape = tuple(np.atleast_1d(shape))
    if len(shape) != npos:
        raise FormatError(f"{npos}D samples do not fit lattice shape {shape}")
    try:
        return SampleSet(shape, pos.reshape(-1, npos), vals)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_mask(mask, path) -> None:
    """Band mask as an 8-bit PGM, 255 in band and 0 elsewhere."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim == 1:
        mask = mask[None, :]
    write_pgm(np.where(mask, 255, 0), path, maxval=255)


def read_mask(path) -> np.ndarray:
    img, maxval = read_pgm(path, return_maxval=True)
    return img >= (maxval + 1) / 2


def write_report(values: dict, path=None) -> str:
    """Line-oriented ``key=value`` text."""
    lines = []
    for k, v in values.items():
        if isinstance(v, (float, np.floating)):
            v = repr(float(v))
        elif isinstance(v, (bool, np.bool_)):
            v = str(bool(v)).lower()
        lines.append(f"{k}={v}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_report(path) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"line {n} is not key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out
