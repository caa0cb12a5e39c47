"""Fast-transform image processing: transforms, filtering, resampling,
transform coding and band-limited recovery."""

__version__ = "0.1.0"
