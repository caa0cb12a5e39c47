"""Synthetic images shared by the demos."""
from __future__ import annotations

import numpy as np


def blobs(n: int = 128, count: int = 8, seed: int = 0) -> np.ndarray:
    """Smooth Gaussian blobs near the centre, values in [0, 1]."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[:n, :n].astype(float)
    c = (n - 1) / 2
    img = np.zeros((n, n))
    for _ in range(count):
        cy, cx = rng.uniform(-n / 10, n / 10, 2) + c
        s = rng.uniform(n / 25, n / 15)
        img += rng.uniform(0.3, 1.0) * np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2 * s * s))
    return img / img.max()


def shapes(n: int = 64) -> np.ndarray:
    """Piecewise-constant rectangles and a disc, values in [0, 255]."""
    y, x = np.mgrid[:n, :n]
    img = np.full((n, n), 100.0)
    img[n // 8: n // 2, n // 8: n // 2] = 200.0
    img[n // 2 + 4: 7 * n // 8, n // 4: 3 * n // 4] = 40.0
    img[(y - 0.3 * n) ** 2 + (x - 0.72 * n) ** 2 < (0.15 * n) ** 2] = 230.0
    return img
