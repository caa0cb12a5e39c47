"""Fast orthogonal transforms: DFT family, DCT, Walsh-Hadamard and Haar.

All transforms are unitary (``1/sqrt(N)`` in both directions).  The forward
DFT kernel is ``exp(+i 2 pi k r / N)``; the inverse uses the conjugate.

Fast paths are radix-2 and apply when the transformed length is a power of
two.  Other lengths fall back to exact direct summation.  2D transforms are
separable: the 1D transform is applied along the last axis, then axis 0.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "KINDS",
    "is_power_of_two",
    "dft",
    "idft",
    "dft2",
    "idft2",
    "sdft",
    "isdft",
    "shsc_dft",
    "ishsc_dft",
    "shscr_dft2",
    "dct",
    "idct",
    "dct2",
    "idct2",
    "dst",
    "idst",
    "hadamard",
    "walsh",
    "iwalsh",
    "haar",
    "ihaar",
    "forward",
    "inverse",
    "forward2",
    "inverse2",
]

#: Transform tags accepted by :func:`forward2` / :func:`inverse2`.
KINDS = ("dft", "dct", "walsh", "hadamard", "haar")


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite samples")


def _require_pow2(n: int, name: str) -> None:
    if not is_power_of_two(n):
        raise ValueError(f"{name} requires a power-of-two length, got {n}")


# ---------------------------------------------------------------------------
# radix-2 FFT core
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _bit_reverse_index(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=256)
def _twiddles(half: int, sign: int) -> np.ndarray:
    return np.exp(sign * 1j * np.pi * np.arange(half) / half)


def _fft_pow2(x: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized radix-2 decimation-in-time FFT along the last axis.

    Computes ``y[r] = sum_k x[k] exp(sign * i 2 pi k r / n)``.
    """
    n = x.shape[-1]
    lead = x.shape[:-1]
    y = np.ascontiguousarray(x[..., _bit_reverse_index(n)], dtype=np.complex128)
    y = y.reshape(-1, n)
    m = y.shape[0]
    half = 1
    while half < n:
        blocks = y.reshape(m, n // (2 * half), 2, half)
        even = blocks[:, :, 0, :]
        odd = blocks[:, :, 1, :] * _twiddles(half, sign)
        y = np.concatenate((even + odd, even - odd), axis=2).reshape(m, n)
        half *= 2
    return y.reshape(*lead, n)


@lru_cache(maxsize=64)
def _dft_matrix(n: int, sign: int) -> np.ndarray:
    k = np.arange(n)
    # reduce k*r mod n before scaling keeps the phase exact for large n
    return np.exp(sign * 2j * np.pi * ((np.outer(k, k) % n) / n))


def _fft(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if is_power_of_two(n):
        return _fft_pow2(x, sign)
    return np.asarray(x, dtype=np.complex128) @ _dft_matrix(n, sign)


def _along(func, x: np.ndarray, axis: int, *args, **kwargs) -> np.ndarray:
    x = np.moveaxis(np.asarray(x), axis, -1)
    return np.moveaxis(func(x, *args, **kwargs), -1, axis)


# ---------------------------------------------------------------------------
# canonical DFT
# ---------------------------------------------------------------------------


def dft(x, axis: int = -1) -> np.ndarray:
    """Unitary forward DFT, ``Sp(r) = N**-0.5 sum_k a_k exp(i 2 pi k r / N)``."""
    x = np.asarray(x)
    _check_finite(x)
    n = x.shape[axis]
    return _along(_fft, x, axis, +1) / np.sqrt(n)


def idft(sp, axis: int = -1) -> np.ndarray:
    """Unitary inverse DFT (conjugate kernel)."""
    sp = np.asarray(sp)
    _check_finite(sp)
    n = sp.shape[axis]
    return _along(_fft, sp, axis, -1) / np.sqrt(n)


def dft2(img) -> np.ndarray:
    return dft(dft(img, axis=-1), axis=0)


def idft2(sp) -> np.ndarray:
    return idft(idft(sp, axis=-1), axis=0)


# ---------------------------------------------------------------------------
# shifted / scaled DFTs
# ---------------------------------------------------------------------------


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def _chirp_eval(a: np.ndarray, beta: float, n_out: int) -> np.ndarray:
    """``y[r] = sum_k a[k] exp(i beta k r)`` for ``r < n_out`` along the last axis.

    Bluestein factorization ``k r = (k^2 + r^2 - (r - k)^2) / 2`` turns the sum
    into a linear convolution with a quadratic-phase chirp.
    """
    n = a.shape[-1]
    m = _next_pow2(n + n_out - 1)
    k = np.arange(n)
    r = np.arange(n_out)
    pre = a * np.exp(0.5j * beta * k.astype(float) ** 2)
    lags = np.arange(-(n - 1), n_out)
    chirp = np.exp(-0.5j * beta * lags.astype(float) ** 2)
    # circular buffer holding chirp[lag] at position lag mod m
    h = np.zeros(m, dtype=np.complex128)
    h[lags % m] = chirp
    buf = np.zeros(a.shape[:-1] + (m,), dtype=np.complex128)
    buf[..., :n] = pre
    conv = _fft_pow2(_fft_pow2(buf, -1) * _fft_pow2(h, -1), +1) / m
    return conv[..., :n_out] * np.exp(0.5j * beta * r.astype(float) ** 2)


def _shsc_core(x, u, v, sigma, sign, n_out, axis):
    x = np.asarray(x)
    _check_finite(x)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not (np.isfinite(u) and np.isfinite(v)):
        raise ValueError("shift parameters must be finite")
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    n_out = n if n_out is None else int(n_out)
    beta = sign * 2 * np.pi / (sigma * n)
    k = np.arange(n)
    r = np.arange(n_out)
    pre = x * np.exp(1j * beta * k * v)
    y = _chirp_eval(pre, beta, n_out)
    y = y * np.exp(1j * beta * u * (r + v))
    return np.moveaxis(y / np.sqrt(n), -1, axis)


def sdft(x, u: float = 0.0, v: float = 0.0, axis: int = -1) -> np.ndarray:
    """Shifted DFT, ``Sp(r) = N**-0.5 sum_k a_k exp(i 2 pi (k+u)(r+v) / N)``.

    Computed with one FFT plus pre/post phase modulation.
    """
    x = np.asarray(x)
    _check_finite(x)
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    k = np.arange(n)
    y = _fft(x * np.exp(2j * np.pi * k * v / n), +1)
    y = y * np.exp(2j * np.pi * u * (k + v) / n) / np.sqrt(n)
    return np.moveaxis(y, -1, axis)


def isdft(sp, u: float = 0.0, v: float = 0.0, axis: int = -1) -> np.ndarray:
    """Inverse shifted DFT; with the same ``(u, v)`` it inverts :func:`sdft`."""
    sp = np.asarray(sp)
    _check_finite(sp)
    sp = np.moveaxis(sp, axis, -1)
    n = sp.shape[-1]
    idx = np.arange(n)
    y = _fft(sp * np.exp(-2j * np.pi * u * idx / n), -1)
    y = y * np.exp(-2j * np.pi * (idx + u) * v / n) / np.sqrt(n)
    return np.moveaxis(y, -1, axis)


def shsc_dft(x, u: float = 0.0, v: float = 0.0, sigma: float = 1.0,
             n_out: int | None = None, axis: int = -1) -> np.ndarray:
    """Shifted scaled DFT with kernel ``exp(i 2 pi (k+u)(r+v) / (sigma N))``.

    Parameters
    ----------
    x : array_like
        Input samples.
    u, v : float
        Shifts of the signal and spectral sampling lattices.
    sigma : float
        Scale parameter, must be positive.
    n_out : int, optional
        Number of output samples ``r = 0 .. n_out-1``; defaults to ``N``.
    """
    return _shsc_core(x, u, v, sigma, +1, n_out, axis)


def ishsc_dft(sp, u: float = 0.0, v: float = 0.0, sigma: float = 1.0,
              n_out: int | None = None, axis: int = -1) -> np.ndarray:
    """Inverse-kernel counterpart of :func:`shsc_dft`.

    Evaluates ``N**-0.5 sum_r Sp(r) exp(-i 2 pi (k+u)(r+v) / (sigma N))``
    for ``k < n_out``; here ``u`` shifts the output (signal) lattice and ``v``
    the input (spectral) lattice.  For ``sigma == 1`` and ``n_out == N`` it is
    the exact inverse of :func:`shsc_dft`.
    """
    sp = np.asarray(sp)
    _check_finite(sp)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    sp = np.moveaxis(sp, axis, -1)
    n = sp.shape[-1]
    n_out = n if n_out is None else int(n_out)
    beta = -2 * np.pi / (sigma * n)
    r = np.arange(n)
    k = np.arange(n_out)
    y = _chirp_eval(sp * np.exp(1j * beta * r * u), beta, n_out)
    y = y * np.exp(1j * beta * v * (k + u))
    return np.moveaxis(y / np.sqrt(n), -1, axis)


def shscr_dft2(img, theta: float = 0.0, u1: float = 0.0, u2: float = 0.0,
               v1: float = 0.0, v2: float = 0.0, sigma: float = 1.0,
               inverse: bool = False) -> np.ndarray:
    """2D shifted scaled rotated DFT of a square ``N x N`` array.

    ``Sp(r, s) = 1/N sum_{k,l} a[k,l] exp(i 2 pi [(k~ cos + l~ sin) r~
    - (k~ sin - l~ cos) s~] / (sigma N))`` with ``k~ = k+u1, l~ = l+u2,
    r~ = r+v1, s~ = s+v2``.  ``inverse=True`` conjugates the kernel.

    The sum over ``l`` is evaluated, for every output row ``r``, as a batch of
    chirp convolutions on the uniform grid ``tau = r~ sin + s~ cos``; the
    remaining sum over ``k`` is a pointwise contraction.  Cost ``O(N^3 log N)``.
    """
    a = np.asarray(img)
    _check_finite(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"shscr_dft2 needs a square 2D array, got {a.shape}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    n = a.shape[0]
    sign = -1.0 if inverse else 1.0
    alpha = sign * 2 * np.pi / (sigma * n)
    c, s = np.cos(theta), np.sin(theta)
    k = np.arange(n) + u1
    rt = np.arange(n) + v1
    st = np.arange(n) + v2
    out = np.empty((n, n), dtype=np.complex128)
    j = np.arange(n)
    lk = np.arange(n)
    for ri, r in enumerate(rt):
        # tau_j = r~ sin + s~_j cos is a uniform grid in j
        tau0 = r * s + v2 * c
        inner = _chirp_eval(a * np.exp(1j * alpha * lk * tau0), alpha * c, n)
        inner *= np.exp(1j * alpha * u2 * (tau0 + c * j))
        # inner[k, j] = sum_l a[k, l] exp(i alpha l~ tau_j)
        rho = r * c - st * s
        out[ri] = np.einsum("kj,kj->j", inner, np.exp(1j * alpha * np.outer(k, rho)))
    return out / n


# ---------------------------------------------------------------------------
# DCT / DST
# ---------------------------------------------------------------------------


def _dct_core(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    ext = np.concatenate((x, x[..., ::-1]), axis=-1)
    y = _fft(ext, -1)[..., :n]
    r = np.arange(n)
    out = 0.5 * np.real(y * np.exp(-1j * np.pi * r / (2 * n)))
    scale = np.full(n, np.sqrt(2.0 / n))
    scale[0] = np.sqrt(1.0 / n)
    return out * scale


def _idct_core(sp: np.ndarray, offset: float = 0.0) -> np.ndarray:
    """Inverse orthonormal DCT evaluated at sample positions ``k + offset``."""
    n = sp.shape[-1]
    r = np.arange(n)
    w = np.full(n, np.sqrt(2.0 / n))
    w[0] = np.sqrt(1.0 / n)
    z = np.zeros(sp.shape[:-1] + (2 * n,), dtype=np.complex128)
    z[..., :n] = sp * w * np.exp(1j * np.pi * r * (0.5 + offset) / n)
    return np.real(_fft(z, +1)[..., :n])


def dct(x, axis: int = -1) -> np.ndarray:
    """Orthonormal DCT-II, ``c(r) sqrt(2/N) sum_k a_k cos(pi (k+1/2) r / N)``.

    Computed from the 2N-point DFT of the even extension ``[x, x[::-1]]``.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    return _along(_dct_core, x, axis)


def idct(sp, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dct` (orthonormal DCT-III)."""
    sp = np.asarray(sp, dtype=float)
    _check_finite(sp)
    return _along(_idct_core, sp, axis)


def dct2(img) -> np.ndarray:
    return dct(dct(img, axis=-1), axis=0)


def idct2(sp) -> np.ndarray:
    return idct(idct(sp, axis=-1), axis=0)


def dst(x, axis: int = -1) -> np.ndarray:
    """Orthonormal DST-II; output index ``j`` holds frequency ``r = j + 1``."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)

    def core(v):
        n = v.shape[-1]
        alt = np.where(np.arange(n) % 2, -1.0, 1.0)
        return _dct_core(v * alt)[..., ::-1]

    return _along(core, x, axis)


def idst(sp, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dst`."""
    sp = np.asarray(sp, dtype=float)
    _check_finite(sp)

    def core(v):
        n = v.shape[-1]
        alt = np.where(np.arange(n) % 2, -1.0, 1.0)
        return _idct_core(v[..., ::-1]) * alt

    return _along(core, sp, axis)


# ---------------------------------------------------------------------------
# Walsh-Hadamard
# ---------------------------------------------------------------------------


def _hadamard_butterfly(x: np.ndarray) -> np.ndarray:
    """Unnormalized natural-order Hadamard transform; additions only."""
    n = x.shape[-1]
    lead = x.shape[:-1]
    y = x.reshape(-1, n)
    m = y.shape[0]
    half = 1
    while half < n:
        blocks = y.reshape(m, n // (2 * half), 2, half)
        a = blocks[:, :, 0, :]
        b = blocks[:, :, 1, :]
        y = np.concatenate((a + b, a - b), axis=2).reshape(m, n)
        half *= 2
    return y.reshape(*lead, n)


def hadamard(x, axis: int = -1) -> np.ndarray:
    """Orthonormal Hadamard transform (natural order); self-inverse."""
    x = np.asarray(x)
    _check_finite(x)
    n = x.shape[axis]
    _require_pow2(n, "hadamard")
    return _along(_hadamard_butterfly, x, axis) / np.sqrt(n)


@lru_cache(maxsize=64)
def _walsh_order(n: int) -> np.ndarray:
    # Walsh row r is Hadamard row bitrev(gray(r))
    r = np.arange(n)
    return _bit_reverse_index(n)[r ^ (r >> 1)] if n > 1 else r


def walsh(x, axis: int = -1) -> np.ndarray:
    """Orthonormal Walsh (sequency-ordered) transform."""
    x = np.asarray(x)
    n = x.shape[axis]
    _require_pow2(n, "walsh")
    h = np.moveaxis(hadamard(x, axis), axis, -1)
    return np.moveaxis(h[..., _walsh_order(n)], -1, axis)


def iwalsh(sp, axis: int = -1) -> np.ndarray:
    sp = np.moveaxis(np.asarray(sp), axis, -1)
    n = sp.shape[-1]
    _require_pow2(n, "walsh")
    h = np.empty_like(sp)
    h[..., _walsh_order(n)] = sp
    return np.moveaxis(hadamard(h, -1), -1, axis)


# ---------------------------------------------------------------------------
# Haar
# ---------------------------------------------------------------------------


def _haar_core(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    out = np.empty(x.shape, dtype=float)
    approx = np.asarray(x, dtype=float)
    size = n
    while size > 1:
        pairs = approx.reshape(approx.shape[:-1] + (size // 2, 2))
        a, b = pairs[..., 0], pairs[..., 1]
        out[..., size // 2:size] = (a - b) / np.sqrt(2.0)
        approx = (a + b) / np.sqrt(2.0)
        size //= 2
    out[..., 0] = approx[..., 0]
    return out


def _ihaar_core(sp: np.ndarray) -> np.ndarray:
    n = sp.shape[-1]
    approx = sp[..., :1].astype(float)
    size = 1
    while size < n:
        detail = sp[..., size:2 * size]
        a = (approx + detail) / np.sqrt(2.0)
        b = (approx - detail) / np.sqrt(2.0)
        approx = np.stack((a, b), axis=-1).reshape(sp.shape[:-1] + (2 * size,))
        size *= 2
    return approx


def haar(x, axis: int = -1) -> np.ndarray:
    """Orthonormal Haar transform via the O(N) pairwise cascade.

    Coefficient ``r = 2**p + q`` is the detail of segment ``q`` at level ``p``
    (positive on the first half of the segment); ``r = 0`` is the mean term.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    _require_pow2(x.shape[axis], "haar")
    return _along(_haar_core, x, axis)


def ihaar(sp, axis: int = -1) -> np.ndarray:
    sp = np.asarray(sp, dtype=float)
    _check_finite(sp)
    _require_pow2(sp.shape[axis], "haar")
    return _along(_ihaar_core, sp, axis)


# ---------------------------------------------------------------------------
# dispatch by tag
# ---------------------------------------------------------------------------

_PAIRS = {
    "dft": (dft, idft),
    "dct": (dct, idct),
    "walsh": (walsh, iwalsh),
    "hadamard": (hadamard, hadamard),
    "haar": (haar, ihaar),
}


def _pair(kind: str):
    try:
        return _PAIRS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown transform kind {kind!r}; expected one of {KINDS}") from None


def forward(x, kind: str, axis: int = -1) -> np.ndarray:
    return _pair(kind)[0](x, axis=axis)


def inverse(sp, kind: str, axis: int = -1) -> np.ndarray:
    return _pair(kind)[1](sp, axis=axis)


def forward2(img, kind: str) -> np.ndarray:
    """Separable 2D forward transform: rows first, then columns."""
    f = _pair(kind)[0]
    return f(f(img, axis=-1), axis=0)


def inverse2(sp, kind: str) -> np.ndarray:
    f = _pair(kind)[1]
    return f(f(sp, axis=-1), axis=0)
