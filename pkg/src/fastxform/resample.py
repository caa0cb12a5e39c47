"""Discrete sinc-interpolation resampling in DFT and DCT domains.

Convention: a shift ``delta`` *samples the signal at* ``k + delta``, so an
integer shift of ``+1`` equals ``np.roll(x, -1)``.  Displacement fields follow
the same backward-mapping rule, ``out(y, x) = in(y + dy, x + dx)``.

DFT-domain operations use the periodic band-limited model.  For even ``N``
the Nyquist coefficient is split evenly between ``+N/2`` and ``-N/2`` so that
real signals stay real.  DCT-domain operations use the model of the
mirror-extended (period ``2N``) signal, which has no border discontinuity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import transforms as tr
from .adaptive import WindowSpec, dct_basis

__all__ = [
    "Sincd",
    "sincd",
    "DisplacementField",
    "zero_pad_interpolate",
    "fractional_shift",
    "shift2",
    "resize_shsc",
    "zoom",
    "rotate_three_pass",
    "rotate_shscr",
    "elastic_resample",
    "differentiate",
    "integrate",
]


def sincd(x, n: int, nyquist_split: bool = False) -> np.ndarray:
    """Discrete sinc ``sin(x) / (n sin(x / n))``.

    With ``nyquist_split=True`` returns the even-``n`` DFT interpolation kernel
    ``sin(x) cos(x / n) / (n sin(x / n))``.
    """
    x = np.asarray(x, dtype=float)
    den = n * np.sin(x / n)
    num = np.sin(x) * (np.cos(x / n) if nyquist_split else 1.0)
    small = np.abs(den) < 1e-12
    # limit at x = m n pi
    m = np.round(x / (n * np.pi))
    limit = np.where(m % 2 == 0, 1.0, (-1.0) ** (n - 1))
    if nyquist_split:
        limit = np.where(m % 2 == 0, 1.0, (-1.0) ** n * 1.0)
    return np.where(small, limit, num / np.where(small, 1.0, den))


@dataclass(frozen=True)
class Sincd:
    """Interpolation kernel of discrete sinc-interpolation on ``n`` samples."""

    n: int

    def __call__(self, x, nyquist_split: bool = False) -> np.ndarray:
        return sincd(x, self.n, nyquist_split)

    def sampled(self, t) -> np.ndarray:
        """Kernel as a function of sample offset ``t`` (``x = pi t``)."""
        return self(np.pi * np.asarray(t, dtype=float), nyquist_split=self.n % 2 == 0)


@dataclass
class DisplacementField:
    """Per-pixel shifts ``(dy, dx)`` in sampling intervals."""

    dy: np.ndarray
    dx: np.ndarray

    def __post_init__(self):
        self.dy = np.asarray(self.dy, dtype=float)
        self.dx = np.asarray(self.dx, dtype=float)
        if self.dy.shape != self.dx.shape or self.dy.ndim != 2:
            raise ValueError("dy and dx must be 2D arrays of equal shape")
        if not (np.all(np.isfinite(self.dy)) and np.all(np.isfinite(self.dx))):
            raise ValueError("displacement field contains non-finite values")

    @property
    def shape(self):
        return self.dy.shape

    @classmethod
    def uniform(cls, shape, dy: float = 0.0, dx: float = 0.0) -> "DisplacementField":
        return cls(np.full(shape, float(dy)), np.full(shape, float(dx)))


def _signed(n: int) -> np.ndarray:
    idx = np.arange(n)
    return np.where(idx <= (n - 1) // 2, idx, idx - n)


def _is_real(x) -> bool:
    return not np.iscomplexobj(x)


def _dft_shift_lines(x: np.ndarray, delta) -> np.ndarray:
    n = x.shape[-1]
    d = np.asarray(delta, dtype=float)
    if d.ndim:
        d = d[..., None]
    sp = tr.dft(x)
    shifted = sp * np.exp(-2j * np.pi * _signed(n) * d / n)
    if n % 2 == 0:
        # Nyquist term split between +N/2 and -N/2
        shifted[..., n // 2] = sp[..., n // 2] * np.cos(np.pi * d[..., 0] if d.ndim else np.pi * d)
    out = tr.idft(shifted)
    return out.real if _is_real(x) else out


def _dct_shift_lines(x: np.ndarray, delta) -> np.ndarray:
    offset = np.asarray(delta, dtype=float)
    if offset.ndim:
        offset = offset[..., None]
    return tr._idct_core(tr.dct(x), offset)


def fractional_shift(x, delta, domain: str = "dct", axis: int = -1) -> np.ndarray:
    """Sample the discrete-sinc model of ``x`` at ``k + delta`` along ``axis``.

    ``delta`` may be a scalar or an array giving one shift per line (shape of
    ``x`` without ``axis``).  The DFT variant analyses with shift ``u`` and
    synthesises with ``u + delta`` (shifted-DFT property); the DCT variant
    does the same on the mirror-extended signal and avoids wrap-around
    ringing at the borders.
    """
    domain = domain.lower()
    x = np.moveaxis(np.asarray(x), axis, -1)
    if not np.all(np.isfinite(delta)):
        raise ValueError("shift must be finite")
    if domain == "dft":
        out = _dft_shift_lines(x, delta)
    elif domain == "dct":
        if np.iscomplexobj(x):
            out = _dct_shift_lines(x.real, delta) + 1j * _dct_shift_lines(x.imag, delta)
        else:
            out = _dct_shift_lines(x, delta)
    else:
        raise ValueError(f"domain must be 'dft' or 'dct', got {domain!r}")
    return np.moveaxis(out, -1, axis)


def shift2(img, dy: float = 0.0, dx: float = 0.0, domain: str = "dct") -> np.ndarray:
    """Separable 2D sub-pixel shift: ``out(y, x) = img(y + dy, x + dx)``."""
    out = fractional_shift(img, dx, domain, axis=1)
    return fractional_shift(out, dy, domain, axis=0)


def _zero_pad_dft_1d(x: np.ndarray, L: int) -> np.ndarray:
    n = x.shape[-1]
    sp = tr.dft(x)
    m = L * n
    big = np.zeros(x.shape[:-1] + (m,), dtype=np.complex128)
    rc = _signed(n)
    big[..., rc % m] = sp
    if n % 2 == 0:
        # Nyquist split; both halves land on one bin when L == 1
        big[..., m - n // 2] = 0.0
        big[..., n // 2] += 0.5 * sp[..., n // 2]
        big[..., m - n // 2] += 0.5 * sp[..., n // 2]
    out = tr.idft(big) * np.sqrt(L)
    return out.real if _is_real(x) else out


def _zero_pad_dct_1d(x: np.ndarray, L: int) -> np.ndarray:
    # interleave L perfect-shifted copies, shifts m / L
    n = x.shape[-1]
    sp = tr.dct(x)
    out = np.empty(x.shape[:-1] + (L * n,))
    for m in range(L):
        out[..., m::L] = tr._idct_core(sp, m / L)
    return out


def zero_pad_interpolate(x, L: int, domain: str = "dft", axes=None) -> np.ndarray:
    """Upsample by an integer factor ``L`` with discrete sinc-interpolation.

    Output sample ``j`` sits at input position ``j / L``, so every ``L``-th
    output reproduces an input sample.  DFT domain pads the (centred)
    spectrum with zeros; DCT domain evaluates the mirror-extended model, which
    is computed as ``L`` interleaved perfect shifts.

    Parameters
    ----------
    x : array_like
        1D signal or 2D image.
    L : int
        Upsampling factor, ``L >= 1``.
    axes : sequence of int, optional
        Axes to upsample; defaults to all axes.
    """
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")
    L = int(L)
    domain = domain.lower()
    if domain not in ("dft", "dct"):
        raise ValueError(f"domain must be 'dft' or 'dct', got {domain!r}")
    out = np.asarray(x)
    if domain == "dct" and np.iscomplexobj(out):
        raise ValueError("DCT-domain interpolation expects a real signal")
    axes = range(out.ndim) if axes is None else axes
    fn = _zero_pad_dft_1d if domain == "dft" else _zero_pad_dct_1d
    for ax in axes:
        out = np.moveaxis(fn(np.moveaxis(out, ax, -1), L), -1, ax)
    return out


def _resample_1d(x: np.ndarray, sigma: float, shift: float, n_out: int) -> np.ndarray:
    n = x.shape[-1]
    sp = tr.dft(x)
    half = n // 2
    # centred spectrum on frequencies -half .. +half (Nyquist split for even n)
    lo = -half
    size = n + 1 if n % 2 == 0 else n
    centred = np.zeros(x.shape[:-1] + (size,), dtype=np.complex128)
    freqs = np.arange(lo, lo + size)
    centred[...] = sp[..., freqs % n]
    if n % 2 == 0:
        centred[..., 0] *= 0.5
        centred[..., -1] *= 0.5
    # y(k) = N**-0.5 sum_f C(f) exp(-i 2 pi (k + shift) f / (sigma N)),  f = j + lo
    beta = -2 * np.pi / (sigma * n)
    j = np.arange(size)
    k = np.arange(n_out)
    y = tr._chirp_eval(centred * np.exp(1j * beta * shift * j), beta, n_out)
    y = y * np.exp(1j * beta * lo * (k + shift)) / np.sqrt(n)
    return y.real if _is_real(x) else y


def resize_shsc(x, sigma: float, shift: float = 0.0, n_out=None, axes=None) -> np.ndarray:
    """Rescale by an arbitrary factor ``sigma`` with discrete sinc-interpolation.

    Output sample ``k`` is the band-limited (DFT) model evaluated at input
    position ``(k + shift) / sigma``; this is the inverse shifted scaled DFT of
    the signal spectrum, computed by chirp convolution.

    Parameters
    ----------
    sigma : float
        Scale factor (> 1 enlarges).  Need not be rational.
    n_out : int or tuple of int, optional
        Output length per axis; default ``ceil(sigma * N)``, i.e. every
        position that falls inside the original extent.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    out = np.asarray(x)
    axes = list(range(out.ndim)) if axes is None else list(axes)
    if n_out is None or np.ndim(n_out) == 0:
        n_out = [n_out] * len(axes)
    for ax, m in zip(axes, n_out):
        n = out.shape[ax]
        if m is None:
            m = int(np.ceil(sigma * n - 1e-9))
        out = np.moveaxis(_resample_1d(np.moveaxis(out, ax, -1), sigma, shift, m), -1, ax)
    return out


def zoom(img, sigma: float) -> np.ndarray:
    """Scale about the image centre by ``sigma`` keeping the frame size.

    Output pixel ``k`` (per axis) samples the input at ``c + (k - c) / sigma``
    with ``c`` the centre; zooming in crops, zooming out wraps the periodic
    model, so content should vanish towards the borders.
    """
    out = np.asarray(img)
    for ax in range(out.ndim):
        n = out.shape[ax]
        c = (n - 1) / 2.0
        out = resize_shsc(out, sigma, shift=c * sigma - c, n_out=n, axes=[ax])
    return out


def _split_angle(theta: float) -> tuple[int, float]:
    quarters = int(np.round(theta / (np.pi / 2)))
    return quarters, theta - quarters * np.pi / 2


def rotate_three_pass(img, theta: float, domain: str = "dct") -> np.ndarray:
    """Rotate about the image centre by three sub-pixel shears.

    Positive ``theta`` agrees with ``np.rot90`` (counter-clockwise as
    displayed).  Multiples of ``pi/2`` are taken out as exact lattice
    rotations; the residual ``|theta| <= pi/4`` is applied as a row shear by
    ``-tan(theta/2)``, a column shear by ``sin(theta)`` and the row shear
    again, each shear being a per-line :func:`fractional_shift`.
    """
    img = np.asarray(img, dtype=float)
    quarters, rest = _split_angle(theta)
    out = np.rot90(img, quarters % 4)
    if rest == 0.0:
        return out.copy()
    h, w = out.shape
    a = -np.tan(rest / 2.0)
    b = np.sin(rest)
    yc = np.arange(h) - (h - 1) / 2.0
    xc = np.arange(w) - (w - 1) / 2.0
    out = fractional_shift(out, a * yc, domain, axis=1)
    out = fractional_shift(out, b * xc, domain, axis=0)
    out = fractional_shift(out, a * yc, domain, axis=1)
    return out


def rotate_shscr(img, theta: float) -> np.ndarray:
    """Rotate a square image in one step with the shifted scaled rotated DFT.

    The image spectrum is resynthesised with the inverse rotated kernel, i.e.
    the band-limited model is sampled on the rotated lattice.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ValueError(f"rotate_shscr needs a square image, got {img.shape}")
    quarters, rest = _split_angle(theta)
    img = np.rot90(img, quarters % 4)
    if rest == 0.0:
        return img.copy()
    n = img.shape[0]
    c = (n - 1) / 2.0
    half = n // 2
    sp = tr.dft2(img)
    idx = (np.arange(n) - half) % n
    centred = sp[np.ix_(idx, idx)]
    p = np.arange(n) - half
    centred = centred * np.exp(-2j * np.pi * np.add.outer(p, p) * c / n)
    out = tr.shscr_dft2(centred, theta=-rest, u1=-half, u2=-half, v1=-c, v2=-c,
                        sigma=1.0, inverse=True)
    return out.real


def elastic_resample(img, field: DisplacementField, window: WindowSpec = WindowSpec(7, 7)) -> np.ndarray:
    """Space-variant resampling with the DCT perfect-shift filter in a window.

    Each output pixel is the centre value of its mirror-extended window after
    a DCT-domain shift by that pixel's ``(dy, dx)``; the shift reduces to a
    separable inner product with interpolation weights.
    """
    img = np.asarray(img, dtype=float)
    if field.shape != img.shape:
        raise ValueError(f"field shape {field.shape} does not match image {img.shape}")
    ry, rx = window.radius
    ext = np.pad(img, ((ry, ry), (rx, rx)), mode="symmetric")
    wins = sliding_window_view(ext, (window.height, window.width))
    by = dct_basis(window.height)
    bx = dct_basis(window.width)
    wy = dct_basis(window.height, ry + field.dy) @ by.T  # (H, W, Wh)
    wx = dct_basis(window.width, rx + field.dx) @ bx.T   # (H, W, Ww)
    return np.einsum("ijk,ijkl,ijl->ij", wy, wins, wx)


def differentiate(x, domain: str = "dct", axis: int = -1) -> np.ndarray:
    """Derivative (per sampling interval) with a ramp frequency response.

    DCT domain: each cosine component ``r`` becomes ``-(pi r / N)`` times the
    matching sine component.  DFT domain: multiply by ``-i 2 pi f / N`` with
    the Nyquist component of even ``N`` set to zero.
    """
    domain = domain.lower()
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    n = x.shape[-1]
    if domain == "dct":
        sp = tr.dct(x)
        r = np.arange(1, n + 1)
        s = np.zeros_like(sp)
        s[..., : n - 1] = -(np.pi * r[: n - 1] / n) * sp[..., 1:]
        out = tr.idst(s)
    elif domain == "dft":
        resp = -2j * np.pi * _signed(n) / n
        if n % 2 == 0:
            resp[n // 2] = 0.0
        out = tr.idft(tr.dft(x) * resp).real
    else:
        raise ValueError(f"domain must be 'dft' or 'dct', got {domain!r}")
    return np.moveaxis(out, -1, axis)


def integrate(x, domain: str = "dct", axis: int = -1) -> np.ndarray:
    """Running integral with a response inversely proportional to frequency.

    The integration constant is zero: the result has zero mean.
    """
    domain = domain.lower()
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    n = x.shape[-1]
    if domain == "dct":
        s = tr.dst(x)
        r = np.arange(1, n)
        sp = np.zeros_like(s)
        sp[..., 1:] = -s[..., : n - 1] * n / (np.pi * r)
        out = tr.idct(sp)
    elif domain == "dft":
        f = _signed(n)
        resp = np.zeros(n, dtype=complex)
        nz = f != 0
        resp[nz] = 1.0 / (-2j * np.pi * f[nz] / n)
        if n % 2 == 0:
            resp[n // 2] = 0.0
        out = tr.idft(tr.dft(x) * resp).real
    else:
        raise ValueError(f"domain must be 'dft' or 'dct', got {domain!r}")
    return np.moveaxis(out, -1, axis)
