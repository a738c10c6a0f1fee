"""Image containers and disk I/O.

Images are held as float64 planes in the nominal 0..255 range. Only 8-bit
PNG and TIFF files are read or written.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

SUPPORTED_FORMATS = {"PNG": "PNG", "TIFF": "TIFF"}
_SUFFIX_FORMAT = {".png": "PNG", ".tif": "TIFF", ".tiff": "TIFF"}

# BT.601 luma
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageFormatError(ValueError):
    """File is not a supported PNG/TIFF image."""


def _as_plane(values, shape=None) -> np.ndarray:
    plane = np.array(values, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-D plane, got shape {plane.shape}")
    if shape is not None and plane.shape != shape:
        raise ValueError(f"plane shape {plane.shape} does not match {shape}")
    if plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError("image dimensions must be at least 1x1")
    if not np.all(np.isfinite(plane)):
        raise ValueError("image planes must be finite")
    plane.setflags(write=False)
    return plane


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Three read-only float64 planes of shape (height, width)."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        r = _as_plane(self.r)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "g", _as_plane(self.g, r.shape))
        object.__setattr__(self, "b", _as_plane(self.b, r.shape))

    @property
    def width(self) -> int:
        return self.r.shape[1]

    @property
    def height(self) -> int:
        return self.r.shape[0]

    @property
    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.r, self.g, self.b

    @classmethod
    def from_array(cls, arr) -> "RgbImage":
        """Build from an (H, W, 3) or (H, W) array; gray input is replicated."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls(arr, arr, arr)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got {arr.shape}")
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    def to_array(self) -> np.ndarray:
        return np.stack(self.planes, axis=-1)

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.planes, other.planes))


@dataclass(frozen=True, eq=False)
class GrayImage:
    plane: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "plane", _as_plane(self.plane))

    @property
    def width(self) -> int:
        return self.plane.shape[1]

    @property
    def height(self) -> int:
        return self.plane.shape[0]


def to_uint8(plane: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half up."""
    return np.floor(np.clip(plane, 0.0, 255.0) + 0.5).astype(np.uint8)


def load_image(path) -> RgbImage:
    """Read an 8-bit PNG or TIFF file.

    Raises
    ------
    OSError
        If the file is missing or cannot be read.
    ImageFormatError
        If the file decodes but is not PNG/TIFF, or is not 8-bit RGB/gray.
    """
    path = os.fspath(path)
    try:
        with Image.open(path) as im:
            fmt = im.format
            mode = im.mode
            if fmt not in SUPPORTED_FORMATS:
                raise ImageFormatError(f"{path}: unsupported format {fmt!r}")
            if mode in ("L", "RGB"):
                arr = np.asarray(im)
            elif mode in ("P", "RGBA", "CMYK", "YCbCr"):
                arr = np.asarray(im.convert("RGB"))
            elif mode in ("1", "LA"):
                arr = np.asarray(im.convert("L"))
            else:
                raise ImageFormatError(f"{path}: unsupported pixel mode {mode!r}")
    except Image.UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: not a recognised image") from exc
    return RgbImage.from_array(arr.astype(np.float64))


def save_image(img: RgbImage, path) -> None:
    """Write ``img`` as 8-bit RGB; format follows the file suffix."""
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    fmt = _SUFFIX_FORMAT.get(suffix)
    if fmt is None:
        raise ImageFormatError(f"{path}: cannot infer PNG/TIFF from suffix {suffix!r}")
    data = np.stack([to_uint8(p) for p in img.planes], axis=-1)
    Image.fromarray(data, mode="RGB").save(path, format=fmt)


def _bilinear_plane(plane: np.ndarray, new_w: int, new_h: int) -> np.ndarray:
    h, w = plane.shape

    def coords(n_out, n_in):
        # pixel-center alignment, clamped at the borders
        x = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        x = np.clip(x, 0.0, n_in - 1)
        lo = np.floor(x).astype(np.intp)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, x - lo

    y0, y1, fy = coords(new_h, h)
    x0, x1, fx = coords(new_w, w)
    top = plane[y0][:, x0] * (1 - fx) + plane[y0][:, x1] * fx
    bottom = plane[y1][:, x0] * (1 - fx) + plane[y1][:, x1] * fx
    return top * (1 - fy)[:, None] + bottom * fy[:, None]


def resize_bilinear(img: RgbImage, new_w: int, new_h: int) -> RgbImage:
    if new_w < 1 or new_h < 1:
        raise ValueError(f"target size must be positive, got {new_w}x{new_h}")
    if (new_w, new_h) == (img.width, img.height):
        return RgbImage(*(p.copy() for p in img.planes))
    return RgbImage(*(_bilinear_plane(p, new_w, new_h) for p in img.planes))


def to_grayscale(img: RgbImage) -> GrayImage:
    wr, _, wb = LUMA_WEIGHTS
    # anchored on green so equal channels map exactly; clip absorbs ulp drift
    gray = img.g + wr * (img.r - img.g) + wb * (img.b - img.g)
    lo = np.minimum(np.minimum(img.r, img.g), img.b)
    hi = np.maximum(np.maximum(img.r, img.g), img.b)
    return GrayImage(np.clip(gray, lo, hi))
