"""Block transform coding: block DCT, truncation, quantization, entropy coding.

Stream layout (all integers little-endian)::

    b"XFL1"
    H:u32  W:u32  block:u16  q:f64  rule:u8  rule_param:f64  entropy:u8
    table_len:u32  n_symbols:u32  payload_len:u32  payload_crc32:u32
    table_len x (run:u16  level:i32  freq:u32)
    payload

Symbols are JPEG-style ``(run, level)`` pairs over the zigzag-ordered
quantized coefficients of each block, closed by the end-of-block symbol
``(0, 0)``.  With the entropy stage on, the payload is a static arithmetic
code driven by the frequency table; otherwise it holds the raw pairs
(``run:u16 level:i32``) and the table is empty.
"""
from __future__ import annotations

import csv
import io
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from . import transforms as tr

__all__ = [
    "RULES",
    "CodecParams",
    "Bitstream",
    "BitstreamError",
    "zigzag_order",
    "truncation_mask",
    "quantize",
    "block_symbols",
    "encode",
    "decode",
    "arith_encode",
    "arith_decode",
    "psnr",
    "blockiness",
    "RDPoint",
    "rate_distortion",
    "rd_to_csv",
]

MAGIC = b"XFL1"
RULES = ("keep_all", "topk", "energy", "threshold")
_HEAD = struct.Struct("<IIHdBdBIIII")
_ENTRY = struct.Struct("<HiI")
_RAW = struct.Struct("<Hi")
EOB = (0, 0)


class BitstreamError(ValueError):
    """Malformed, truncated or corrupted codec stream."""


@dataclass(frozen=True)
class CodecParams:
    """Coding parameters.

    ``rule`` picks the per-block truncation: ``keep_all``; ``topk`` keeps the
    ``param`` largest-magnitude coefficients; ``energy`` keeps the fewest
    coefficients holding fraction ``param`` of the block energy;
    ``threshold`` keeps coefficients with ``|c| > param``.  Ties are broken
    by ascending zigzag index.
    """

    block: int = 8
    rule: str = "keep_all"
    param: float = 0.0
    q: float = 1.0
    entropy: bool = True

    def __post_init__(self):
        if self.block < 2 or self.block > 256:
            raise ValueError(f"block must lie in [2, 256], got {self.block}")
        if not self.q > 0 or not np.isfinite(self.q):
            raise ValueError(f"quantizer step must be positive, got {self.q}")
        if self.rule not in RULES:
            raise ValueError(f"unknown truncation rule {self.rule!r}; choose from {RULES}")
        if self.rule == "topk" and not (1 <= self.param <= self.block ** 2 and int(self.param) == self.param):
            raise ValueError(f"topk needs an integer K in [1, {self.block ** 2}], got {self.param}")
        if self.rule == "energy" and not 0 < self.param <= 1:
            raise ValueError(f"energy fraction must lie in (0, 1], got {self.param}")
        if self.rule == "threshold" and self.param < 0:
            raise ValueError("threshold must be non-negative")


@dataclass(frozen=True)
class Bitstream:
    """Encoded image: raw bytes plus the dimensions read from its header."""

    data: bytes

    @property
    def shape(self) -> tuple[int, int]:
        if len(self.data) < len(MAGIC) + 8:
            raise BitstreamError("stream too short for a header")
        return struct.unpack_from("<II", self.data, len(MAGIC))

    @property
    def bpp(self) -> float:
        h, w = self.shape
        return 8.0 * len(self.data) / (h * w)

    def __len__(self) -> int:
        return len(self.data)


def zigzag_order(b: int) -> np.ndarray:
    """Linear indices of a ``b x b`` block in JPEG zigzag order."""
    idx = []
    for s in range(2 * b - 1):
        rows = range(max(0, s - b + 1), min(s, b - 1) + 1)
        rows = rows if s % 2 else reversed(rows)
        idx.extend(i * b + (s - i) for i in rows)
    return np.array(idx)


def _to_blocks(img: np.ndarray, b: int) -> np.ndarray:
    h, w = img.shape
    img = np.pad(img, ((0, -h % b), (0, -w % b)), mode="edge")
    nby, nbx = img.shape[0] // b, img.shape[1] // b
    return img.reshape(nby, b, nbx, b).swapaxes(1, 2)


def _from_blocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    nby, nbx, b, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(nby * b, nbx * b)[:h, :w]


def truncation_mask(coeffs: np.ndarray, rule: str, param: float = 0.0) -> np.ndarray:
    """Boolean keep-mask for rows of zigzag-ordered block coefficients."""
    coeffs = np.atleast_2d(coeffs)
    if rule == "keep_all":
        return np.ones(coeffs.shape, dtype=bool)
    if rule == "threshold":
        return np.abs(coeffs) > param
    energy = coeffs ** 2
    order = np.argsort(-energy, axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(coeffs.shape[1])[None, :].repeat(len(coeffs), 0), axis=1)
    if rule == "topk":
        return rank < int(param)
    if rule == "energy":
        sorted_e = np.take_along_axis(energy, order, axis=1)
        cum = np.cumsum(sorted_e, axis=1)
        total = cum[:, -1:]
        need = np.sum(cum < param * total * (1 - 1e-12), axis=1) + 1
        need = np.where(total[:, 0] > 0, need, 0)
        return rank < need[:, None]
    raise ValueError(f"unknown truncation rule {rule!r}")


def quantize(c, q: float) -> np.ndarray:
    """Uniform mid-tread quantizer, ``sign(c) * floor(|c| / q + 1/2)``."""
    c = np.asarray(c, dtype=float)
    lv = np.sign(c) * np.floor(np.abs(c) / q + 0.5)
    if np.any(np.abs(lv) >= 2 ** 31):
        raise ValueError("quantizer step too small: levels overflow 32 bits")
    return lv.astype(np.int64)


def _block_coeffs(img: np.ndarray, p: CodecParams):
    blocks = _to_blocks(img, p.block)
    spectra = tr.dct(tr.dct(blocks, axis=-1), axis=-2)
    zz = zigzag_order(p.block)
    flat = spectra.reshape(-1, p.block * p.block)[:, zz]
    return blocks.shape[:2], flat


def block_symbols(levels: np.ndarray) -> list[tuple[int, int]]:
    """Run-length ``(run, level)`` symbols for rows of zigzag levels."""
    out = []
    for row in levels:
        prev = -1
        for pos in np.flatnonzero(row):
            out.append((int(pos - prev - 1), int(row[pos])))
            prev = pos
        out.append(EOB)
    return out


# --- static arithmetic coder -------------------------------------------------

_BITS = 32
_TOP = (1 << _BITS) - 1
_HALF = 1 << (_BITS - 1)
_Q1 = 1 << (_BITS - 2)
_Q3 = 3 * _Q1
_MAX_TOTAL = 1 << 24


def _scaled_freqs(freqs: np.ndarray) -> np.ndarray:
    freqs = np.asarray(freqs, dtype=np.int64)
    total = int(freqs.sum())
    if total <= _MAX_TOTAL:
        return freqs
    return np.maximum(1, freqs * _MAX_TOTAL // total)


def arith_encode(indices, freqs) -> bytes:
    """Arithmetic-code symbol ``indices`` under static frequencies ``freqs``."""
    cum = np.concatenate([[0], np.cumsum(freqs)]).tolist()
    total = cum[-1]
    bits = []
    emit = bits.append
    low, high, pending = 0, _TOP, 0
    for s in indices:
        rng = high - low + 1
        high = low + rng * cum[s + 1] // total - 1
        low = low + rng * cum[s] // total
        while True:
            if high < _HALF:
                emit(0)
                bits.extend([1] * pending)
                pending = 0
            elif low >= _HALF:
                emit(1)
                bits.extend([0] * pending)
                pending = 0
                low -= _HALF
                high -= _HALF
            elif low >= _Q1 and high < _Q3:
                pending += 1
                low -= _Q1
                high -= _Q1
            else:
                break
            low <<= 1
            high = (high << 1) | 1
    pending += 1
    if low < _Q1:
        emit(0)
        bits.extend([1] * pending)
    else:
        emit(1)
        bits.extend([0] * pending)
    return np.packbits(np.array(bits, dtype=np.uint8)).tobytes()


def arith_decode(payload: bytes, freqs, count: int) -> np.ndarray:
    """Inverse of :func:`arith_encode` for ``count`` symbols."""
    cum_arr = np.concatenate([[0], np.cumsum(freqs)])
    cum = cum_arr.tolist()
    total = cum[-1]
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8)).tolist()
    nbits = len(bits)
    pos = 0
    value = 0
    for _ in range(_BITS):
        value = (value << 1) | (bits[pos] if pos < nbits else 0)
        pos += 1
    low, high = 0, _TOP
    out = np.empty(count, dtype=np.int64)
    for n in range(count):
        rng = high - low + 1
        target = ((value - low + 1) * total - 1) // rng
        if not 0 <= target < total:
            raise BitstreamError("arithmetic decoder lost synchronisation")
        s = int(np.searchsorted(cum_arr, target, side="right")) - 1
        out[n] = s
        high = low + rng * cum[s + 1] // total - 1
        low = low + rng * cum[s] // total
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                value -= _HALF
            elif low >= _Q1 and high < _Q3:
                low -= _Q1
                high -= _Q1
                value -= _Q1
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            value = (value << 1) | (bits[pos] if pos < nbits else 0)
            pos += 1
    return out


# --- encoder / decoder --------------------------------------------------------

def _rule_code(rule: str) -> int:
    return RULES.index(rule)


def encode(img, p: CodecParams = CodecParams()) -> Bitstream:
    """Encode a real image.

    Parameters
    ----------
    img : array_like
        2D real image.  Sides need not be multiples of the block size: edge
        blocks are replicate-padded and the decoder crops.
    p : CodecParams
        Block size, truncation rule, quantizer step and entropy switch.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite samples")
    h, w = img.shape
    _, flat = _block_coeffs(img, p)
    keep = truncation_mask(flat, p.rule, p.param)
    levels = np.where(keep, quantize(flat, p.q), 0)
    symbols = block_symbols(levels)
    if p.entropy:
        table, inverse, counts = np.unique(np.array(symbols, dtype=np.int64), axis=0,
                                           return_inverse=True, return_counts=True)
        freqs = _scaled_freqs(counts)
        payload = arith_encode(inverse.ravel().tolist(), freqs)
        table_bytes = b"".join(_ENTRY.pack(int(r), int(l), int(f)) for (r, l), f in zip(table, freqs))
        table_len = len(table)
    else:
        payload = b"".join(_RAW.pack(r, l) for r, l in symbols)
        table_bytes, table_len = b"", 0
    head = _HEAD.pack(h, w, p.block, p.q, _rule_code(p.rule), float(p.param), int(p.entropy),
                      table_len, len(symbols), len(payload), zlib.crc32(payload))
    return Bitstream(MAGIC + head + table_bytes + payload)


def read_header(data: bytes) -> tuple[CodecParams, dict]:
    """Parse and validate the stream header."""
    if len(data) < len(MAGIC) + _HEAD.size:
        raise BitstreamError(f"stream of {len(data)} bytes is shorter than the header")
    if data[:4] != MAGIC:
        raise BitstreamError(f"bad magic {data[:4]!r}")
    (h, w, block, q, rule, param, entropy, table_len, n_sym,
     payload_len, crc) = _HEAD.unpack_from(data, len(MAGIC))
    if h == 0 or w == 0 or rule >= len(RULES) or entropy > 1:
        raise BitstreamError("inconsistent header fields")
    try:
        p = CodecParams(block, RULES[rule], param, q, bool(entropy))
    except ValueError as exc:
        raise BitstreamError(f"invalid coding parameters in header: {exc}") from None
    info = dict(height=h, width=w, table_len=table_len, n_symbols=n_sym,
                payload_len=payload_len, crc=crc)
    return p, info


def decode(bs) -> np.ndarray:
    """Reconstruct the image from a :class:`Bitstream` or raw bytes."""
    data = bs.data if isinstance(bs, Bitstream) else bytes(bs)
    p, info = read_header(data)
    off = len(MAGIC) + _HEAD.size
    table_end = off + info["table_len"] * _ENTRY.size
    end = table_end + info["payload_len"]
    if len(data) < end:
        raise BitstreamError(f"stream truncated: {len(data)} bytes, header promises {end}")
    if len(data) > end:
        raise BitstreamError(f"{len(data) - end} trailing bytes after payload")
    payload = data[table_end:end]
    if zlib.crc32(payload) != info["crc"]:
        raise BitstreamError("payload checksum mismatch")
    count = info["n_symbols"]
    if p.entropy:
        if info["table_len"] == 0:
            raise BitstreamError("entropy-coded stream without a symbol table")
        entries = np.array([_ENTRY.unpack_from(data, off + i * _ENTRY.size)
                            for i in range(info["table_len"])], dtype=np.int64)
        idx = arith_decode(payload, entries[:, 2], count)
        symbols = entries[idx, :2]
    else:
        if info["payload_len"] != count * _RAW.size:
            raise BitstreamError("raw payload length does not match symbol count")
        symbols = np.array(list(_RAW.iter_unpack(payload)), dtype=np.int64).reshape(-1, 2)
    h, w, b = info["height"], info["width"], p.block
    nby, nbx = -(-h // b), -(-w // b)
    nb, area = nby * nbx, b * b
    levels = np.zeros((nb, area), dtype=np.int64)
    blk, pos = 0, 0
    for run, level in symbols.tolist():
        if blk >= nb:
            raise BitstreamError("more blocks in payload than the image holds")
        if run == 0 and level == 0:
            blk, pos = blk + 1, 0
            continue
        pos += run
        if pos >= area or level == 0:
            raise BitstreamError(f"invalid run-length symbol in block {blk}")
        levels[blk, pos] = level
        pos += 1
    if blk != nb:
        raise BitstreamError(f"payload holds {blk} blocks, expected {nb}")
    flat = np.empty((nb, area))
    flat[:, zigzag_order(b)] = levels * p.q
    spectra = flat.reshape(nby, nbx, b, b)
    blocks = tr.idct(tr.idct(spectra, axis=-1), axis=-2)
    return _from_blocks(blocks, h, w)


# --- quality measures -----------------------------------------------------

def psnr(ref, test, peak=None) -> float:
    """Peak signal-to-noise ratio in dB; ``peak`` defaults to the reference range."""
    ref = np.asarray(ref, dtype=float)
    test = np.asarray(test, dtype=float)
    if peak is None:
        peak = float(ref.max() - ref.min()) or 1.0
    mse = float(np.mean((ref - test) ** 2))
    return float("inf") if mse == 0 else float(10.0 * np.log10(peak ** 2 / mse))


def blockiness(img, block: int = 8) -> float:
    """Mean |neighbour difference| across block borders minus that elsewhere."""
    img = np.asarray(img, dtype=float)
    on, off = [], []
    for d in (np.abs(np.diff(img, axis=1)), np.abs(np.diff(img, axis=0)).T):
        border = (np.arange(d.shape[1]) + 1) % block == 0
        on.append(d[:, border].ravel())
        off.append(d[:, ~border].ravel())
    on, off = np.concatenate(on), np.concatenate(off)
    if on.size == 0 or off.size == 0:
        return 0.0
    return float(on.mean() - off.mean())


@dataclass(frozen=True)
class RDPoint:
    params: CodecParams
    bpp: float
    psnr_db: float
    blockiness: float


def rate_distortion(img, sweep) -> list[RDPoint]:
    """Encode/decode ``img`` for every parameter set in ``sweep``."""
    sweep = list(sweep)
    if len(sweep) < 2:
        raise ValueError("a rate-distortion sweep needs at least two points")
    img = np.asarray(img, dtype=float)
    out = []
    for p in sweep:
        bs = encode(img, p)
        rec = decode(bs)
        out.append(RDPoint(p, bs.bpp, psnr(img, rec), blockiness(rec, p.block)))
    return out


def rd_to_csv(points, path=None) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["bpp", "psnr_db", "blockiness"])
    for pt in points:
        wr.writerow([repr(float(v)) for v in (pt.bpp, pt.psnr_db, pt.blockiness)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
