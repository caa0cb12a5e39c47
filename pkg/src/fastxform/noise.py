"""Deterministic, platform-independent noise.

Uniform variates come from a counter-based SplitMix64 generator: the ``i``-th
64-bit output of stream ``s`` under seed ``seed`` is the SplitMix64 finaliser
applied to ``seed * 2**32 + s + (i + 1) * 0x9E3779B97F4A7C15`` (mod ``2**64``).
The top 53 bits give a uniform double in ``[0, 1)``.  Gaussian variates use
Box-Muller on consecutive pairs: ``sqrt(-2 ln(1 - u0)) cos(2 pi u1)``.
"""
from __future__ import annotations

import numpy as np

__all__ = ["splitmix64", "uniform", "gaussian", "add_awgn"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(counter) -> np.ndarray:
    """SplitMix64 finaliser of a uint64 array (wrapping arithmetic)."""
    z = np.asarray(counter, dtype=np.uint64).copy()
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _key(seed: int, stream: int) -> np.uint64:
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative")
    return np.uint64(((int(seed) << 32) + int(stream)) & 0xFFFFFFFFFFFFFFFF)


def uniform(n: int, seed: int, stream: int = 0, offset: int = 0) -> np.ndarray:
    """``n`` uniform doubles in ``[0, 1)`` at counters ``offset .. offset + n - 1``."""
    i = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        ctr = _key(seed, stream) + i * _GOLDEN
    bits = splitmix64(ctr) >> np.uint64(11)
    return bits.astype(np.float64) * 2.0 ** -53


def gaussian(shape, seed: int, sigma: float = 1.0, stream: int = 0) -> np.ndarray:
    """Zero-mean Gaussian samples of standard deviation ``sigma``."""
    shape = tuple(np.atleast_1d(shape).astype(int))
    n = int(np.prod(shape))
    u = uniform(2 * n, seed, stream).reshape(n, 2)
    z = np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    return (sigma * z).reshape(shape)


def add_awgn(img, sigma: float, seed: int, stream: int = 0) -> np.ndarray:
    """Return ``img`` plus white Gaussian noise of standard deviation ``sigma``."""
    img = np.asarray(img, dtype=float)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    return img + gaussian(img.shape, seed, sigma, stream)
