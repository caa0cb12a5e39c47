"""Sliding-window (local adaptive) DCT-domain filtering.

Window spectra are updated recursively as the window moves by one pixel, so
the per-pixel cost is proportional to the window area rather than to
``area * log(area)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import transforms as tr
from .filters import FilterSpec, filter_gain

__all__ = [
    "WindowSpec",
    "VISION_PRESET",
    "dct_basis",
    "running_dct",
    "sliding_dct",
    "window_spectra",
    "local_adaptive_filter",
]


@dataclass(frozen=True)
class WindowSpec:
    height: int = 7
    width: int = 7
    mode: str = "central"

    def __post_init__(self):
        if self.height < 1 or self.width < 1 or self.height % 2 == 0 or self.width % 2 == 0:
            raise ValueError(f"window dimensions must be odd and positive, got {self.height}x{self.width}")
        if self.height * self.width < 9:
            raise ValueError("window must hold at least 9 pixels")
        if self.mode not in ("central", "accumulate"):
            raise ValueError(f"mode must be 'central' or 'accumulate', got {self.mode!r}")

    @property
    def radius(self) -> tuple[int, int]:
        return self.height // 2, self.width // 2


#: Window roughly matching the acute-vision field for a 512x512 image.
VISION_PRESET = WindowSpec(35, 35)


def dct_basis(n: int, positions=None) -> np.ndarray:
    """Orthonormal inverse-DCT basis ``B[k, r]`` evaluated at ``positions``.

    ``positions`` defaults to the sample lattice ``0 .. n-1``; fractional
    positions give the DCT-domain (even-extension) sinc interpolator.
    """
    k = np.arange(n, dtype=float) if positions is None else np.asarray(positions, dtype=float)
    r = np.arange(n)
    w = np.full(n, np.sqrt(2.0 / n))
    w[0] = np.sqrt(1.0 / n)
    return np.cos(np.pi * np.multiply.outer(k + 0.5, r) / n) * w


def running_dct(x, width: int, axis: int = -1) -> np.ndarray:
    """Orthonormal DCT of every length-``width`` window along ``axis``.

    Output axis ``axis`` indexes window start positions; a new trailing axis
    holds the ``width`` coefficients.  Only the first window is transformed
    directly; the others follow from the recursion

        Z[p+1](r) = exp(-i pi r / W) (Z[p](r) - x[p] e0(r) + x[p+W] eW(r)),

    on the complex sum ``Z[p](r) = sum_k x[p+k] exp(i pi (k + 1/2) r / W)``
    whose real part is the DCT-II sum.
    """
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    length = x.shape[-1]
    if width > length:
        raise ValueError(f"window {width} longer than signal {length}")
    r = np.arange(width)
    basis = np.exp(1j * np.pi * np.outer(np.arange(width) + 0.5, r) / width)
    rot = np.exp(-1j * np.pi * r / width)
    e_out = basis[0]
    e_in = np.exp(1j * np.pi * (width + 0.5) * r / width)
    npos = length - width + 1
    out = np.empty(x.shape[:-1] + (npos, width))
    z = x[..., :width] @ basis
    out[..., 0, :] = z.real
    for p in range(1, npos):
        z = rot * (z - x[..., p - 1, None] * e_out + x[..., p + width - 1, None] * e_in)
        out[..., p, :] = z.real
    scale = np.full(width, np.sqrt(2.0 / width))
    scale[0] = np.sqrt(1.0 / width)
    out *= scale
    return np.moveaxis(out, -2, axis if axis >= 0 else axis - 1)


def _extend(img: np.ndarray, w: WindowSpec) -> np.ndarray:
    ry, rx = w.radius
    return np.pad(img, ((ry, ry), (rx, rx)), mode="symmetric")


def sliding_dct(img, w: WindowSpec) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(row, spectra)`` with ``spectra[j]`` the window DCT centred at ``(row, j)``.

    The image is mirror-extended by the window radius.  Column-window
    transforms are computed recursively down each column; every output row
    then seeds its own recursion along the row.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError("sliding_dct expects a 2D image")
    ext = _extend(img, w)
    # cols[i, c, r]: DCT over rows i .. i+Wh-1 of extended column c
    cols = running_dct(ext, w.height, axis=0)
    for i in range(img.shape[0]):
        # along the row, for each row-frequency r: windows over columns
        spectra = running_dct(cols[i].T, w.width, axis=-1)  # (Wh, W, Ww)
        yield i, spectra.transpose(1, 0, 2)


def window_spectra(img, w: WindowSpec) -> np.ndarray:
    """All window spectra as one ``(H, W, Wh, Ww)`` array."""
    img = np.asarray(img, dtype=float)
    out = np.empty(img.shape + (w.height, w.width))
    for i, row in sliding_dct(img, w):
        out[i] = row
    return out


def local_adaptive_filter(img, w: WindowSpec, f: FilterSpec) -> np.ndarray:
    """Sliding-window DCT filtering with the scalar filters of :mod:`filters`.

    At every position the window spectrum is multiplied by the filter gain.
    In ``central`` mode the output pixel is the window-centre value of the
    inverse transform (one inner product); in ``accumulate`` mode every
    window pixel estimate is kept and overlapping estimates are averaged.

    ``f.noise_ps`` must be a scalar: white-noise power per orthonormal
    coefficient, identical for every window size.
    """
    if f.isfr is not None:
        raise ValueError("ISFR correction is not available in sliding-window mode")
    if np.ndim(f.noise_ps) != 0:
        raise ValueError("sliding-window filtering needs a scalar (flat) noise power")
    img = np.asarray(img, dtype=float)
    h, wd = img.shape
    ry, rx = w.radius
    by = dct_basis(w.height)
    bx = dct_basis(w.width)
    if w.mode == "central":
        out = np.empty_like(img)
        centre = np.outer(by[ry], bx[rx])
        for i, spectra in sliding_dct(img, w):
            g = filter_gain(spectra, f.noise_ps, f.kind, f.P)
            out[i] = np.einsum("jrs,rs->j", spectra * g, centre)
        return out
    acc = np.zeros((h + 2 * ry, wd + 2 * rx))
    cnt = np.zeros_like(acc)
    for i, spectra in sliding_dct(img, w):
        g = filter_gain(spectra, f.noise_ps, f.kind, f.P)
        est = np.einsum("kr,jrs,ls->jkl", by, spectra * g, bx)
        for j in range(wd):
            acc[i:i + w.height, j:j + w.width] += est[j]
            cnt[i:i + w.height, j:j + w.width] += 1
    return acc[ry:ry + h, rx:rx + wd] / cnt[ry:ry + h, rx:rx + wd]
