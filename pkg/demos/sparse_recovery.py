"""Recover a band-limited signal from a few irregular samples."""
from __future__ import annotations

import numpy as np

from fastxform import recovery
from fastxform import transforms as tr

rng = np.random.default_rng(3)
n, band = 64, 8
sp = np.zeros(n)
sp[:band] = rng.normal(size=band)
truth = tr.idct(sp)
samples = recovery.SampleSet.from_signal(truth, np.sort(rng.choice(n, 12, replace=False)))
mask = recovery.make_band_mask(n, "rect", band, domain="dct")

direct = recovery.recover_direct(samples, mask, domain="dct")
gp = recovery.recover_gp(samples, mask, domain="dct", max_iters=2000)
print(f"direct solve: max error {abs(direct.signal - truth).max():.1e}, condition {direct.condition:.1f}")
print(f"iterative:    max error {abs(gp.signal - truth).max():.1e} after {gp.iterations} iterations")

k = 0.074 * 256 ** 2
m, feasible = recovery.cs_sample_bound(k, 256 ** 2)
print(f"CS bound for 7.4% sparsity on 256x256: M/N = {m / 256 ** 2:.3f}, feasible {feasible}")

s = recovery.generate_sinclet(512, (205, 308), 51)
print(f"sinc-let 103 x 51: {100 * s.spatial_concentration:.3f}% in support, "
      f"{100 * s.spectral_concentration:.3f}% in band")
