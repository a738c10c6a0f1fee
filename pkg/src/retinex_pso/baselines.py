"""Histogram equalization baseline, applied to each channel independently."""
import numpy as np

from .image_io import RgbImage, to_uint8


def equalize_plane(plane: np.ndarray) -> np.ndarray:
    levels = to_uint8(plane)
    counts = np.bincount(levels.ravel(), minlength=256)
    cdf = np.cumsum(counts) / levels.size
    lut = np.floor(255.0 * cdf + 0.5)
    return lut[levels]


def histogram_equalize(img: RgbImage) -> RgbImage:
    return RgbImage(*(equalize_plane(p) for p in img.planes))
