"""Band-limited recovery from sparse samples, sinc-lets and uncertainty counts.

A signal on an ``N``-point (or ``H x W``) lattice is assumed to have nonzero
transform coefficients only inside a :class:`BandMask`-style boolean mask.
Given ``K`` samples it can be recovered by a least-squares solve over the
in-band coefficients or by Gerchberg-Papoulis alternating projections.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms as tr

__all__ = [
    "SampleSet",
    "RecoveryReport",
    "UncertaintyReport",
    "SincletResult",
    "make_band_mask",
    "recover_direct",
    "recover_gp",
    "band_project",
    "generate_sinclet",
    "uncertainty_report",
    "cs_sample_bound",
]

ILL_CONDITIONED = 1e12
DOMAINS = ("dft", "dct")


@dataclass
class SampleSet:
    """Known samples of a signal on a dense lattice of shape ``shape``.

    ``positions`` is ``(K,)`` for 1D lattices or ``(K, 2)`` (row, col) for 2D.
    """

    shape: tuple
    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        pos = np.asarray(self.positions, dtype=np.int64)
        if len(self.shape) == 1:
            pos = pos.reshape(-1, 1)
        if pos.ndim != 2 or pos.shape[1] != len(self.shape):
            raise ValueError(f"positions of shape {pos.shape} do not fit a {len(self.shape)}D lattice")
        self.positions = pos
        self.values = np.asarray(self.values, dtype=float).ravel()
        if len(self.values) != len(pos):
            raise ValueError("positions and values differ in length")
        if len(pos) == 0:
            raise ValueError("a sample set needs at least one sample")
        if np.any(pos < 0) or np.any(pos >= np.array(self.shape)):
            raise ValueError("sample position outside the lattice")
        if len(np.unique(self.linear)) != len(pos):
            raise ValueError("sample positions must be distinct")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")

    @property
    def K(self) -> int:
        return len(self.values)

    @property
    def N(self) -> int:
        return int(np.prod(self.shape))

    @property
    def linear(self) -> np.ndarray:
        return np.ravel_multi_index(tuple(self.positions.T), self.shape)

    @classmethod
    def from_signal(cls, signal, positions) -> "SampleSet":
        """Take samples of a dense signal at ``positions`` (linear or per-axis)."""
        signal = np.asarray(signal, dtype=float)
        pos = np.asarray(positions)
        if signal.ndim > 1 and pos.ndim == 1:
            pos = np.stack(np.unravel_index(pos, signal.shape), axis=1)
        vals = signal[tuple(np.asarray(pos).reshape(len(pos), -1).T)]
        return cls(signal.shape, pos, vals)

    def known_mask(self) -> np.ndarray:
        m = np.zeros(self.N, dtype=bool)
        m[self.linear] = True
        return m.reshape(self.shape)


@dataclass
class RecoveryReport:
    """Outcome of a recovery run.

    ``residual`` is the max-abs error at the known positions; ``history``
    holds the root-sum-square data residual after every iteration.
    """

    signal: np.ndarray
    iterations: int
    residual: float
    converged: bool
    history: list = field(default_factory=list)
    condition: float = float("nan")
    underdetermined: bool = False
    ill_conditioned: bool = False

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "condition": self.condition,
            "underdetermined": self.underdetermined,
            "ill_conditioned": self.ill_conditioned,
        }


@dataclass(frozen=True)
class UncertaintyReport:
    n_sign: int
    n_spect: int
    N: int

    @property
    def product(self) -> int:
        return self.n_sign * self.n_spect

    @property
    def satisfied(self) -> bool:
        return self.product >= self.N

    def as_dict(self) -> dict:
        return {"n_sign": self.n_sign, "n_spect": self.n_spect, "N": self.N,
                "product": self.product, "satisfied": self.satisfied}


def _check_domain(domain: str) -> str:
    domain = domain.lower()
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")
    return domain


def _signed(n: int) -> np.ndarray:
    idx = np.arange(n)
    return np.where(idx <= n // 2, idx, idx - n)


def _freq_axes(shape, domain: str):
    return [np.arange(n) if domain == "dct" else _signed(n) for n in shape]


def make_band_mask(shape, kind: str = "rect", dims=None, radius=None,
                   angle: float = np.pi / 2, domain: str = "dct", custom=None) -> np.ndarray:
    """Boolean spectral support mask.

    Parameters
    ----------
    shape : int or tuple
        Spectrum shape (1D or 2D).
    kind : {'rect', 'sector', 'custom'}
        ``rect`` keeps the ``dims`` lowest frequencies per axis; ``sector``
        keeps frequencies with radius ``<= radius`` and polar angle (from the
        row-frequency axis) in ``[0, angle]``; ``custom`` takes ``custom``.
    domain : {'dct', 'dft'}
        DCT masks are anchored at index 0.  DFT masks are symmetric about
        zero frequency so that real signals stay real: ``rect`` keeps
        ``|f| <= (d - 1) // 2`` (all frequencies when ``d >= n``) and
        ``sector`` keeps a frequency when it or its negative lies in the sector.
    """
    domain = _check_domain(domain)
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    if kind == "custom":
        mask = np.asarray(custom, dtype=bool)
        if mask.shape != shape:
            raise ValueError(f"custom mask shape {mask.shape} does not match {shape}")
    elif kind == "rect":
        dims = tuple(int(d) for d in np.atleast_1d(dims if dims is not None else shape))
        if len(dims) != len(shape) or any(d < 1 or d > n for d, n in zip(dims, shape)):
            raise ValueError(f"rect dims {dims} must lie within {shape}")
        keep = []
        for d, n, f in zip(dims, shape, _freq_axes(shape, domain)):
            if domain == "dct":
                keep.append(f < d)
            else:
                keep.append(np.ones(n, bool) if d >= n else np.abs(f) <= (d - 1) // 2)
        mask = keep[0]
        for k in keep[1:]:
            mask = np.logical_and.outer(mask, k)
    elif kind == "sector":
        if len(shape) != 2:
            raise ValueError("sector masks are two-dimensional")
        if radius is None or radius < 0:
            raise ValueError("sector mask needs a non-negative radius")
        fr, fs = np.meshgrid(*_freq_axes(shape, domain), indexing="ij")

        def inside(a, b):
            phi = np.arctan2(b, a)
            return (np.hypot(a, b) <= radius) & (phi >= -1e-12) & (phi <= angle + 1e-12)

        mask = inside(fr, fs)
        if domain == "dft":
            mask |= inside(-fr, -fs)
        mask |= (fr == 0) & (fs == 0)
    else:
        raise ValueError(f"unknown mask kind {kind!r}")
    if not mask.any():
        raise ValueError("band mask is empty")
    return mask


def _basis_columns(n: int, domain: str) -> np.ndarray:
    """Matrix whose column ``r`` is the inverse transform of unit coefficient ``r``."""
    eye = np.eye(n)
    return (tr.idct(eye, axis=0) if domain == "dct" else tr.idft(eye, axis=0))


def _system(samples: SampleSet, mask: np.ndarray, domain: str) -> tuple[np.ndarray, np.ndarray]:
    coeffs = np.argwhere(mask)
    a = np.ones((samples.K, len(coeffs)), dtype=complex if domain == "dft" else float)
    for ax, n in enumerate(samples.shape):
        b = _basis_columns(n, domain)
        a = a * b[np.ix_(samples.positions[:, ax], coeffs[:, ax])]
    return a, coeffs


def band_project(x, mask, domain: str = "dct") -> np.ndarray:
    """Zero the transform coefficients of ``x`` outside ``mask``."""
    domain = _check_domain(domain)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        sp = tr.forward(x, domain)
        return np.real(tr.inverse(np.where(mask, sp, 0), domain))
    sp = tr.forward2(x, domain)
    return np.real(tr.inverse2(np.where(mask, sp, 0), domain))


def _data_residual(x: np.ndarray, samples: SampleSet) -> np.ndarray:
    return x.ravel()[samples.linear] - samples.values


def recover_direct(samples: SampleSet, mask, domain: str = "dct", tol: float = 1e-8) -> RecoveryReport:
    """Least-squares fit of the in-band coefficients to the known samples.

    Solved by an SVD-based orthogonal factorisation; when there are fewer
    samples than in-band coefficients the minimum-norm solution is returned
    and flagged ``underdetermined``.
    """
    domain = _check_domain(domain)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != samples.shape:
        raise ValueError(f"mask shape {mask.shape} does not match lattice {samples.shape}")
    a, coeffs = _system(samples, mask, domain)
    sol, _, rank, sv = np.linalg.lstsq(a, samples.values.astype(a.dtype), rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    sp = np.zeros(samples.shape, dtype=a.dtype)
    sp[tuple(coeffs.T)] = sol
    if len(samples.shape) == 1:
        x = tr.inverse(sp, domain)
    else:
        x = tr.inverse2(sp, domain)
    x = np.real(x)
    res = float(np.max(np.abs(_data_residual(x, samples))))
    return RecoveryReport(
        signal=x,
        iterations=1,
        residual=res,
        converged=res < tol,
        history=[float(np.linalg.norm(_data_residual(x, samples)))],
        condition=cond,
        underdetermined=bool(samples.K < len(coeffs) or rank < len(coeffs)),
        ill_conditioned=cond > ILL_CONDITIONED,
    )


def recover_gp(samples: SampleSet, mask, domain: str = "dct", max_iters: int = 500,
               tol: float = 1e-6, init=None) -> RecoveryReport:
    """Gerchberg-Papoulis iteration.

    Each iteration projects onto the band (zeroing out-of-mask coefficients)
    and then hard-replaces the known samples.  The returned signal is the
    band-limited iterate; iteration stops once its max-abs error at the known
    positions drops below ``tol``.
    """
    domain = _check_domain(domain)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != samples.shape:
        raise ValueError(f"mask shape {mask.shape} does not match lattice {samples.shape}")
    x = np.zeros(samples.shape) if init is None else np.array(init, dtype=float)
    flat = x.reshape(-1)
    flat[samples.linear] = samples.values
    history = []
    y = x
    for it in range(1, max_iters + 1):
        y = band_project(x, mask, domain)
        err = _data_residual(y, samples)
        history.append(float(np.linalg.norm(err)))
        res = float(np.max(np.abs(err)))
        if res < tol:
            return RecoveryReport(y, it, res, True, history)
        x = y.copy()
        x.reshape(-1)[samples.linear] = samples.values
    return RecoveryReport(y, max_iters, res, False, history)


# --- sinc-lets and the discrete uncertainty principle ------------------------

@dataclass
class SincletResult:
    """A space- and band-concentrated kernel.

    ``kernel`` is band-limited; ``spatial_concentration`` is its energy
    fraction inside the support, ``spectral_concentration`` the in-band
    energy fraction of its support-truncated version.
    """

    kernel: np.ndarray
    iterations: int
    spatial_concentration: float
    spectral_concentration: float
    support_size: int
    band_size: int
    N: int
    converged: bool

    @property
    def eq6_satisfied(self) -> bool:
        return self.support_size * self.band_size >= self.N

    @property
    def concentrated(self) -> bool:
        return min(self.spatial_concentration, self.spectral_concentration) >= 0.99


def _band_1d(n: int, bandwidth: int, domain: str) -> np.ndarray:
    if domain == "dct":
        return np.arange(n) < bandwidth
    return np.abs(_signed(n)) <= (bandwidth - 1) // 2 if bandwidth < n else np.ones(n, bool)


def generate_sinclet(n: int, support, bandwidth: int, iters: int = 2000,
                     domain: str = "dft", tol: float = 1e-12, center=None) -> SincletResult:
    """Build a kernel concentrated on ``support`` and inside a band.

    Starting from an impulse at the support centre, alternately zero the
    samples outside ``support = (start, stop)`` (stop exclusive), project onto
    the band of ``bandwidth`` lowest frequencies and renormalise to unit
    energy, until successive kernels differ by less than ``tol``.  In the DFT
    domain the band is symmetric, ``|f| <= (bandwidth - 1) // 2``.
    """
    domain = _check_domain(domain)
    start, stop = (0, n) if support is None else (int(support[0]), int(support[1]))
    if not 0 <= start < stop <= n:
        raise ValueError(f"support {support} must be a non-empty range within [0, {n})")
    if not 1 <= bandwidth <= n:
        raise ValueError(f"bandwidth must lie in [1, {n}], got {bandwidth}")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    inside = np.zeros(n, dtype=bool)
    inside[start:stop] = True
    band = _band_1d(n, bandwidth, domain)
    x = np.zeros(n)
    x[(start + stop - 1) // 2 if center is None else int(center)] = 1.0
    converged = False
    it = 0
    for it in range(1, iters + 1):
        y = band_project(np.where(inside, x, 0.0), band, domain)
        nrm = np.linalg.norm(y)
        if nrm == 0:
            break
        y /= nrm
        delta = np.linalg.norm(y - x)
        x = y
        if delta < tol:
            converged = True
            break
    spatial = float(np.sum(x[inside] ** 2) / np.sum(x ** 2))
    cut = np.where(inside, x, 0.0)
    sp = tr.forward(cut, domain)
    e = np.abs(sp) ** 2
    spectral = float(e[band].sum() / e.sum()) if e.sum() > 0 else 0.0
    return SincletResult(x, it, spatial, spectral, stop - start, int(band.sum()), n, converged)


def uncertainty_report(signal, signal_tol=None, spect_tol=None, domain: str = "dft") -> UncertaintyReport:
    """Count essentially nonzero samples in signal and spectral domains.

    A value counts when its magnitude exceeds the tolerance; the default
    tolerance is ``1e-9`` times the largest magnitude in that domain.
    """
    domain = _check_domain(domain)
    x = np.asarray(signal)
    sp = tr.forward(x, domain) if x.ndim == 1 else tr.forward2(x, domain)
    counts = []
    for v, tol in ((np.abs(x), signal_tol), (np.abs(sp), spect_tol)):
        if tol is not None and tol < 0:
            raise ValueError("tolerances must be non-negative")
        t = 1e-9 * v.max() if tol is None else tol
        counts.append(int(np.sum(v > t)))
    return UncertaintyReport(counts[0], counts[1], int(x.size))


def cs_sample_bound(K: float, N: int) -> tuple[float, bool]:
    """Sample count ``M = K log2 N`` suggested for compressive sensing.

    Returns ``(M, feasible)`` where feasible means ``M < N``.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    m = K * np.log2(N)
    return float(m), bool(m < N)
