"""Global versus sliding-window rejective filtering of a noisy image."""
from __future__ import annotations

import numpy as np
from _images import shapes

from fastxform import filters, noise
from fastxform.adaptive import WindowSpec, local_adaptive_filter

clean = shapes(64)
noisy = noise.add_awgn(clean, 25.0, seed=7)
spec = filters.FilterSpec("rejective", 25.0 ** 2)


def rmse(a):
    return np.sqrt(np.mean((a - clean) ** 2))


print(f"noisy input         RMSE {rmse(noisy):6.2f}")
print(f"global DCT filter   RMSE {rmse(filters.apply_filter(noisy, 'dct', spec)):6.2f}")
print(f"7x7 sliding window  RMSE {rmse(local_adaptive_filter(noisy, WindowSpec(7, 7), spec)):6.2f}")
est = filters.estimate_noise_ps(noisy, "dct")
print(f"estimated noise power {float(np.mean(est)):.0f} (true 625)")
