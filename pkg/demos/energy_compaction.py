"""How many coefficients hold 95% of an image's variance, per transform?"""
from __future__ import annotations

import numpy as np
from _images import blobs

from fastxform import spectral
from fastxform import transforms as tr

img = blobs(256, count=12, seed=1) + 0.02 * np.random.default_rng(1).normal(size=(256, 256))
img = img - img.mean()
print("fraction of coefficients holding 95% of the variance")
for kind in ("dct", "dft", "walsh", "hadamard", "haar"):
    s = spectral.sparsity_at_energy(tr.forward2(img, kind), 0.95)
    print(f"  {kind:9s} {100 * s:6.2f}%")

# keep only the strongest DCT coefficients and look at the error
approx, err = spectral.band_limited_approx(img, "dct", spectral.energy_mask(tr.dct2(img), 0.99))
print(f"99% energy DCT approximation, RMSE {err:.2e}")
