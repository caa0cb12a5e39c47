"""Energy compaction, band-limited approximation and spectral masks."""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import transforms as tr

__all__ = [
    "CompactionProfile",
    "compaction_profile",
    "sparsity_at_energy",
    "band_limited_approx",
    "energy_mask",
    "rect_outline",
    "blockwise_spectra",
    "mean_block_sparsity",
    "pooled_block_sparsity",
]


@dataclass
class CompactionProfile:
    """Cumulative energy of coefficients sorted by decreasing energy.

    ``cumulative_energy[m - 1]`` is the energy fraction held by the ``m``
    strongest coefficients.
    """

    cumulative_energy: np.ndarray
    total_energy: float
    degenerate: bool = False
    order: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.cumulative_energy)

    def retained_fraction(self) -> np.ndarray:
        return np.arange(1, self.size + 1) / self.size

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["retained_fraction", "cumulative_energy"])
        for f, e in zip(self.retained_fraction(), self.cumulative_energy):
            w.writerow([repr(float(f)), repr(float(e))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _energy_order(energy: np.ndarray) -> np.ndarray:
    # stable sort on -energy keeps ascending linear index among ties
    return np.argsort(-energy, kind="stable")


def compaction_profile(sp, exclude_dc: bool = False) -> CompactionProfile:
    """Energy compaction profile of a spectrum.

    Parameters
    ----------
    sp : array_like
        Transform coefficients (any shape; real or complex).
    exclude_dc : bool
        Drop the coefficient at linear index 0 before measuring, so the
        profile describes variance rather than total energy.
    """
    energy = np.abs(np.asarray(sp)).ravel() ** 2
    if energy.size == 0:
        raise ValueError("empty spectrum")
    if exclude_dc:
        if energy.size < 2:
            raise ValueError("exclude_dc needs at least two coefficients")
        energy = energy[1:]
    order = _energy_order(energy)
    total = float(energy.sum())
    if total == 0.0:
        warnings.warn("all-zero spectrum; compaction profile is degenerate", RuntimeWarning)
        return CompactionProfile(np.ones(energy.size), 0.0, True, order)
    cum = np.cumsum(energy[order]) / total
    cum = np.minimum(cum, 1.0)
    cum[-1] = 1.0
    return CompactionProfile(cum, total, False, order)


def sparsity_at_energy(sp, fraction: float = 0.95, exclude_dc: bool = False) -> float:
    """Fraction of coefficients needed to hold ``fraction`` of the energy."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    prof = sp if isinstance(sp, CompactionProfile) else compaction_profile(sp, exclude_dc)
    m = int(np.searchsorted(prof.cumulative_energy, fraction - 1e-12, side="left")) + 1
    return min(m, prof.size) / prof.size


def band_limited_approx(img, kind: str, mask) -> tuple[np.ndarray, float]:
    """Keep only in-mask coefficients of a separable 2D transform.

    Returns the approximation and its root-mean-square error.
    """
    img = np.asarray(img, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape:
        raise ValueError(f"mask shape {mask.shape} does not match image shape {img.shape}")
    sp = tr.forward2(img, kind)
    approx = tr.inverse2(np.where(mask, sp, 0), kind)
    approx = np.real(approx)
    rmse = float(np.sqrt(np.mean((approx - img) ** 2)))
    return approx, rmse


def energy_mask(sp, fraction: float) -> np.ndarray:
    """Smallest set of strongest coefficients holding ``fraction`` of the energy."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    sp = np.asarray(sp)
    prof = compaction_profile(sp)
    m = int(round(sparsity_at_energy(prof, fraction) * prof.size))
    mask = np.zeros(sp.size, dtype=bool)
    mask[prof.order[:m]] = True
    return mask.reshape(sp.shape)


def rect_outline(mask) -> tuple[tuple[int, int, int, int], float]:
    """Bounding rectangle ``(row0, row1, col0, col1)`` (inclusive) of a mask.

    The second value is the rectangle area as a fraction of the mask size.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("mask has no true entries")
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    r0, r1, c0, c1 = int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])
    area = (r1 - r0 + 1) * (c1 - c0 + 1)
    return (r0, r1, c0, c1), area / mask.size


def _blocks(img: np.ndarray, block: int) -> np.ndarray:
    h, w = img.shape
    ph, pw = -h % block, -w % block
    if ph or pw:
        img = np.pad(img, ((0, ph), (0, pw)), mode="symmetric")
    nby, nbx = img.shape[0] // block, img.shape[1] // block
    return img.reshape(nby, block, nbx, block).swapaxes(1, 2)


def blockwise_spectra(img, block: int) -> np.ndarray:
    """DCT of every non-overlapping ``block x block`` tile.

    Returns an array of shape ``(nby, nbx, block, block)``.  Images whose
    sides are not multiples of ``block`` are padded by symmetric replication.
    """
    if block <= 0:
        raise ValueError(f"block must be positive, got {block}")
    img = np.asarray(img, dtype=float)
    return tr.dct(tr.dct(_blocks(img, block), axis=-1), axis=-2)


def mean_block_sparsity(img, block: int, fraction: float = 0.95,
                        exclude_dc: bool = False) -> float:
    """Average per-block :func:`sparsity_at_energy` over blocks.

    Only blocks lying wholly inside the original image take part when any
    exist; blocks with zero (AC) energy are skipped.
    """
    img = np.asarray(img, dtype=float)
    spectra = blockwise_spectra(img, block)
    nby, nbx = img.shape[0] // block, img.shape[1] // block
    if nby and nbx:
        spectra = spectra[:nby, :nbx]
    values = []
    for sp in spectra.reshape(-1, block, block):
        e = np.abs(sp).ravel() ** 2
        if (e[1:] if exclude_dc else e).sum() == 0:
            continue
        values.append(sparsity_at_energy(sp, fraction, exclude_dc))
    if not values:
        return 1.0 / (block * block - (1 if exclude_dc else 0))
    return float(np.mean(values))


def pooled_block_sparsity(img, block: int, fraction: float = 0.95,
                          exclude_dc: bool = False) -> float:
    """Sparsity of the block transform taken as a whole.

    The coefficients of all full blocks are pooled and
    :func:`sparsity_at_energy` is applied once, which answers "what fraction
    of block-transform coefficients holds ``fraction`` of the energy".  With
    ``exclude_dc`` the global image mean is removed first, the blockwise
    analogue of dropping the global dc coefficient.
    """
    img = np.asarray(img, dtype=float)
    if exclude_dc:
        img = img - img.mean()
    spectra = blockwise_spectra(img, block)
    nby, nbx = img.shape[0] // block, img.shape[1] // block
    if nby and nbx:
        spectra = spectra[:nby, :nbx]
    return sparsity_at_energy(spectra, fraction)
