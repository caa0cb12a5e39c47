"""Transform-domain scalar filters for denoising, deblurring and enhancement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import transforms as tr

__all__ = [
    "FILTER_KINDS",
    "FilterSpec",
    "filter_gain",
    "apply_gain",
    "apply_filter",
    "estimate_noise_ps",
    "suppress_narrowband",
]

FILTER_KINDS = ("wiener", "preservation", "rejective", "plaw")

_ALIASES = {
    "empiricalwiener": "wiener",
    "wiener": "wiener",
    "spectrumpreservation": "preservation",
    "preservation": "preservation",
    "soft": "preservation",
    "rejective": "rejective",
    "hard": "rejective",
    "plaw": "plaw",
    "p-law": "plaw",
}

# |ISFR| below this fraction of its maximum gets zero gain
ISFR_FLOOR = 1e-3

# median of |X|^2 / E|X|^2 for periodogram bins: exponential (complex) and chi2_1 (real)
_MEDIAN_COMPLEX = np.log(2.0)
_MEDIAN_REAL = 0.4549364231195724


@dataclass
class FilterSpec:
    """Which scalar filter to apply and with what noise model.

    ``noise_ps`` is either a grid shaped like the spectrum or a scalar
    (flat, white-noise variance per unitary coefficient).  ``isfr`` is the
    imaging-system frequency response; ``None`` means identity.
    """

    kind: str = "wiener"
    noise_ps: object = 0.0
    P: float = 1.0
    isfr: object = None

    def __post_init__(self):
        key = self.kind.lower().replace("_", "").replace(" ", "")
        if key not in _ALIASES:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        self.kind = _ALIASES[key]
        if not 0.0 <= self.P <= 1.0:
            raise ValueError(f"P must lie in [0, 1], got {self.P}")
        if np.any(np.asarray(self.noise_ps) < 0):
            raise ValueError("noise power spectrum must be non-negative")


def _inverse_isfr(isfr, shape) -> np.ndarray:
    if isfr is None:
        return np.ones(shape)
    isfr = np.broadcast_to(np.asarray(isfr), shape)
    mag = np.abs(isfr)
    ok = mag >= ISFR_FLOOR * mag.max()
    inv = np.zeros(shape, dtype=np.result_type(isfr.dtype, float))
    inv[ok] = 1.0 / isfr[ok]
    return inv


def filter_gain(sp, noise_ps, kind: str = "wiener", P: float = 1.0, isfr=None) -> np.ndarray:
    """Per-coefficient multiplier of the selected filter.

    ``wiener``: ``max(0, 1 - N/|S|^2)``; ``preservation``: its square root;
    ``rejective``: 1 where ``|S|^2 > N`` else 0; ``plaw``: ``|S|^-(1-P)`` on
    the same support.  All are divided by ``isfr`` when one is given.
    """
    kind = FilterSpec(kind, P=P).kind
    sp = np.asarray(sp)
    power = np.abs(sp) ** 2
    noise = np.broadcast_to(np.asarray(noise_ps, dtype=float), power.shape)
    keep = power > noise
    safe = np.where(keep, power, 1.0)
    if kind == "rejective":
        g = keep.astype(float)
    elif kind == "wiener":
        g = np.where(keep, 1.0 - noise / safe, 0.0)
    elif kind == "preservation":
        g = np.where(keep, np.sqrt(np.maximum(1.0 - noise / safe, 0.0)), 0.0)
    else:
        g = np.where(keep, safe ** (-(1.0 - P) / 2.0), 0.0)
    if isfr is not None:
        g = g * _inverse_isfr(isfr, power.shape)
    return g


def apply_gain(sp, f: FilterSpec) -> np.ndarray:
    return np.asarray(sp) * filter_gain(sp, f.noise_ps, f.kind, f.P, f.isfr)


def apply_filter(img, domain: str, f: FilterSpec) -> np.ndarray:
    """Filter an image globally in a transform domain.

    The ISFR (deblurring) term is only meaningful in the DFT and DCT domains
    and is rejected elsewhere.
    """
    domain = domain.lower()
    if f.isfr is not None and domain not in ("dft", "dct"):
        raise ValueError(f"ISFR correction is defined only for DFT/DCT, not {domain!r}")
    img = np.asarray(img, dtype=float)
    sp = tr.forward2(img, domain)
    for name, grid in (("noise_ps", f.noise_ps), ("isfr", f.isfr)):
        if grid is not None and np.ndim(grid) and np.shape(grid) != sp.shape:
            raise ValueError(f"{name} shape {np.shape(grid)} does not match spectrum {sp.shape}")
    out = tr.inverse2(apply_gain(sp, f), domain)
    return np.real(out)


def _frequency_radius(shape, domain: str) -> np.ndarray:
    axes = []
    for n in shape:
        idx = np.arange(n)
        if domain == "dft":
            axes.append(np.abs(np.where(idx <= n // 2, idx, idx - n)) / n)
        else:
            axes.append(idx / (2.0 * n))
    return np.hypot(*np.meshgrid(*axes, indexing="ij"))


def estimate_noise_ps(img, domain: str = "dct") -> float:
    """Estimate a flat (white) noise power per unitary coefficient.

    Takes the median of ``|Sp|^2`` over the quarter of spectral indices with
    the highest radial frequency and divides it by the median-to-mean ratio of
    the periodogram bin distribution (``ln 2`` for complex DFT bins, the
    chi-square(1) median for real DCT bins).
    """
    domain = domain.lower()
    if domain not in ("dft", "dct"):
        raise ValueError(f"noise estimation supports dft or dct, not {domain!r}")
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or min(img.shape) < 16:
        raise ValueError(f"noise estimation needs an image of at least 16x16, got {img.shape}")
    power = np.abs(tr.forward2(img, domain)) ** 2
    radius = _frequency_radius(img.shape, domain)
    cut = np.quantile(radius, 0.75)
    band = power[radius >= cut]
    ratio = _MEDIAN_COMPLEX if domain == "dft" else _MEDIAN_REAL
    return float(np.median(band) / ratio)


def _protect_disc(shape, domain: str, radius: float) -> np.ndarray:
    axes = []
    for n in shape:
        idx = np.arange(n)
        axes.append(np.where(idx <= n // 2, idx, idx - n) if domain == "dft" else idx)
    return np.hypot(*np.meshgrid(*axes, indexing="ij")) <= radius


def suppress_narrowband(img, domain: str = "dft", peak_factor: float = 8.0,
                        protect_radius: int = 4, size: int = 5,
                        separable: bool = False) -> np.ndarray:
    """Reject isolated spectral peaks (moire, banding).

    A coefficient is zeroed when its magnitude exceeds ``peak_factor`` times
    the median magnitude of its spectral neighbourhood, unless it lies in the
    protected low-frequency disc.  With ``separable=True`` the neighbourhood
    is a 1D window along spectrum rows and, separately, along columns; this
    catches banding, whose energy sits on a single spectral line.
    """
    if not peak_factor > 1:
        raise ValueError(f"peak_factor must exceed 1, got {peak_factor}")
    domain = domain.lower()
    if domain not in ("dft", "dct"):
        raise ValueError(f"narrowband suppression supports dft or dct, not {domain!r}")
    img = np.asarray(img, dtype=float)
    sp = tr.forward2(img, domain)
    mag = np.abs(sp)
    mode = "wrap" if domain == "dft" else "mirror"
    if separable:
        footprints = [(1, size), (size, 1)]
    else:
        footprints = [(size, size)]
    peaks = np.zeros(sp.shape, dtype=bool)
    for fp in footprints:
        med = ndimage.median_filter(mag, size=fp, mode=mode)
        peaks |= mag > peak_factor * med
    peaks &= ~_protect_disc(sp.shape, domain, protect_radius)
    return np.real(tr.inverse2(np.where(peaks, 0, sp), domain))
