"""Rate-distortion sweep of the block DCT codec."""
from __future__ import annotations

from _images import blobs

from fastxform import codec

img = 255 * blobs(128, seed=4)
points = codec.rate_distortion(img, [codec.CodecParams(q=q) for q in (1, 8, 16, 32, 64, 128)])
print(codec.rd_to_csv(points))

stream = codec.encode(img, codec.CodecParams(q=20, rule="topk", param=6))
print(f"top-6 coefficients per block at q=20: {len(stream)} bytes, "
      f"PSNR {codec.psnr(img, codec.decode(stream)):.1f} dB")
