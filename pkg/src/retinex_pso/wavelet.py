"""Single-level orthonormal Haar wavelet energies.

AWE is the mean energy of the approximation band, DWE the mean energy of
the three detail bands. Both are normalized by the (padded) pixel count,
so AWE + DWE equals the mean squared intensity.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .image_io import GrayImage, RgbImage, to_grayscale


@dataclass(frozen=True)
class WEComparison:
    awe_original: float
    awe_enhanced: float
    dwe_original: float
    dwe_enhanced: float
    awe_ratio: float
    dwe_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "WEComparison":
        return cls(**{k: float(d[k]) for k in cls.__dataclass_fields__})


def _pad_even(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return np.pad(plane, ((0, h % 2), (0, w % 2)), mode="edge")


def dwt2_haar(gray: GrayImage):
    """Return ``(LL, LH, HL, HH)``; odd sides are padded by edge replication.

    LH holds horizontal edges (vertical high-pass), HL vertical edges.
    """
    p = _pad_even(gray.plane)
    a = p[0::2, 0::2]
    b = p[0::2, 1::2]
    c = p[1::2, 0::2]
    d = p[1::2, 1::2]
    ll = (a + b + c + d) / 2.0
    lh = (a + b - c - d) / 2.0
    hl = (a - b + c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    return ll, lh, hl, hh


def idwt2_haar(ll, lh, hl, hh) -> np.ndarray:
    h, w = ll.shape
    out = np.empty((2 * h, 2 * w), dtype=np.float64)
    out[0::2, 0::2] = (ll + lh + hl + hh) / 2.0
    out[0::2, 1::2] = (ll + lh - hl - hh) / 2.0
    out[1::2, 0::2] = (ll - lh + hl - hh) / 2.0
    out[1::2, 1::2] = (ll - lh - hl + hh) / 2.0
    return out


def _padded_count(gray: GrayImage) -> int:
    return (gray.height + gray.height % 2) * (gray.width + gray.width % 2)


def approximate_we(gray: GrayImage) -> float:
    ll = dwt2_haar(gray)[0]
    return float(np.sum(ll * ll)) / _padded_count(gray)


def detailed_we(gray: GrayImage) -> float:
    _, lh, hl, hh = dwt2_haar(gray)
    total = np.sum(lh * lh) + np.sum(hl * hl) + np.sum(hh * hh)
    return float(total) / _padded_count(gray)


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return 1.0 if num == 0 else float("inf")
    return num / den


def we_report(original: RgbImage, enhanced: RgbImage) -> WEComparison:
    if (original.width, original.height) != (enhanced.width, enhanced.height):
        raise ValueError(
            f"size mismatch: {original.width}x{original.height} vs {enhanced.width}x{enhanced.height}"
        )
    g0, g1 = to_grayscale(original), to_grayscale(enhanced)
    a0, a1 = approximate_we(g0), approximate_we(g1)
    d0, d1 = detailed_we(g0), detailed_we(g1)
    return WEComparison(a0, a1, d0, d1, _ratio(a1, a0), _ratio(d1, d0))
