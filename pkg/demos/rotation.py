"""Rotate an image sixteen times by 22.5 degrees and compare with the original."""
from __future__ import annotations

import numpy as np
from _images import blobs

from fastxform import resample

img = blobs(128)
out = img.copy()
for _ in range(16):
    out = resample.rotate_three_pass(out, np.pi / 8)
inner = np.s_[24:-24, 24:-24]
err = np.sqrt(np.mean((out[inner] - img[inner]) ** 2))
print(f"after a full turn in 16 steps: interior RMSE {err:.2e}")

# a quarter turn in four steps lands on the exact 90 degree rotation
q = img
for _ in range(4):
    q = resample.rotate_three_pass(q, np.pi / 8)
print(f"four steps vs np.rot90: RMSE {np.sqrt(np.mean((q - np.rot90(img)) ** 2)):.2e}")

# zoom in and back out, 20 times
z = img
for _ in range(20):
    z = resample.zoom(resample.zoom(z, np.sqrt(2)), 1 / np.sqrt(2))
inner = np.s_[16:-16, 16:-16]
print(f"20 zoom cycles at sqrt(2): interior RMSE {np.sqrt(np.mean((z[inner] - img[inner]) ** 2)):.2e}")
