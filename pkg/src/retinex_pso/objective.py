"""Edge/entropy fitness used to score an enhanced image.

fitness = log(log(E)) * (edgels / pixels) * H

where E is the sum of Sobel magnitudes of the gray image, edgels counts
magnitudes above a threshold and H is the 256-bin histogram entropy.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import _ext
from .image_io import GrayImage, RgbImage, to_grayscale, to_uint8

# keeps log(log(E)) defined for flat images
EDGE_SUM_FLOOR = math.e + 1e-9


@dataclass(frozen=True)
class FitnessReport:
    fitness: float
    edge_intensity_sum: float
    edgel_count: int
    entropy_bits: float
    pixel_count: int
    edge_threshold: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitnessReport":
        return cls(
            fitness=float(d["fitness"]),
            edge_intensity_sum=float(d["edge_intensity_sum"]),
            edgel_count=int(d["edgel_count"]),
            entropy_bits=float(d["entropy_bits"]),
            pixel_count=int(d["pixel_count"]),
            edge_threshold=float(d["edge_threshold"]),
        )


def sobel_magnitude(gray: GrayImage) -> np.ndarray:
    return _ext.sobel_magnitude(gray.plane)


def count_edgels(sobel: np.ndarray, threshold: float) -> int:
    """Number of samples strictly above ``threshold``."""
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    return int(np.count_nonzero(np.asarray(sobel) > threshold))


def entropy(gray: GrayImage) -> float:
    """Shannon entropy in bits of the rounded 8-bit histogram."""
    counts = np.bincount(to_uint8(gray.plane).ravel(), minlength=256)
    p = counts[counts > 0] / counts.sum()
    h = float(-np.sum(p * np.log2(p)))
    return h if h > 0 else 0.0


def fitness(enhanced: RgbImage, threshold: Optional[float] = None) -> FitnessReport:
    """Score ``enhanced``; ``threshold=None`` uses the mean Sobel magnitude."""
    gray = to_grayscale(enhanced)
    edges = sobel_magnitude(gray)
    edge_sum = float(edges.sum())
    thr = float(edges.mean()) if threshold is None else float(threshold)
    n_edgels = count_edgels(edges, thr)
    h = entropy(gray)
    pixels = gray.width * gray.height
    value = math.log(math.log(max(edge_sum, EDGE_SUM_FLOOR))) * (n_edgels / pixels) * h
    return FitnessReport(
        fitness=value,
        edge_intensity_sum=edge_sum,
        edgel_count=n_edgels,
        entropy_bits=h,
        pixel_count=pixels,
        edge_threshold=thr,
    )
