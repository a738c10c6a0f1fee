"""Multiscale retinex with the classic and the modified color restoration.

All logarithms take ``x + 1`` so black pixels stay finite. Outputs of
:func:`msrcr` and :func:`msrmcr` are clamped to [0, 255] only at the very
end; pass ``clamp=False`` to inspect the raw values.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import ClassVar, Union

import numpy as np

from . import _ext
from .image_io import RgbImage

# maps the nominal +-4.5 MSR range onto 0..255
RANGE_SCALE = 28.44
RANGE_OFFSET = 128.0


@dataclass(frozen=True, eq=False)
class GaussianSurround:
    sigma: float
    radius: int
    taps: np.ndarray

    def kernel_2d(self) -> np.ndarray:
        return np.outer(self.taps, self.taps)


def gaussian_surround(sigma: float, img_w: int, img_h: int) -> GaussianSurround:
    """Normalized 1-D Gaussian factor, truncated at ceil(3 sigma).

    The radius never exceeds the larger image side; wider kernels would only
    revisit reflected copies of the same pixels.
    """
    if not sigma > 0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be a positive finite number, got {sigma}")
    radius = min(math.ceil(3.0 * sigma), max(img_w, img_h))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    taps /= taps.sum()
    taps.setflags(write=False)
    return GaussianSurround(float(sigma), int(radius), taps)


def surround_convolve(plane: np.ndarray, surround: GaussianSurround) -> np.ndarray:
    return _ext.convolve_separable(plane, surround.taps)


@dataclass(frozen=True)
class ScaleWeights:
    w1: float = 1.0 / 3.0
    w2: float = 1.0 / 3.0
    w3: float = 1.0 / 3.0

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ValueError(f"scale weights must be finite and non-negative: {ws}")
        if abs(sum(ws) - 1.0) > 1e-12:
            raise ValueError(f"scale weights must sum to 1, got {sum(ws)!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)


DEFAULT_WEIGHTS = ScaleWeights()


class _Params:
    variant: ClassVar[str]
    names: ClassVar[tuple[str, ...]]

    def _check_sigmas(self):
        s = (self.sigma1, self.sigma2, self.sigma3)
        if not all(math.isfinite(getattr(self, f.name)) for f in fields(self)):
            raise ValueError(f"{self.variant} parameters must be finite")
        if not 0 < s[0] < s[1] < s[2]:
            raise ValueError(f"sigmas must satisfy 0 < s1 < s2 < s3, got {s}")

    @property
    def sigmas(self) -> tuple[float, float, float]:
        return (self.sigma1, self.sigma2, self.sigma3)

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.names], dtype=np.float64)

    @classmethod
    def from_vector(cls, vec):
        return cls(*(float(v) for v in vec))

    def to_dict(self) -> dict:
        return {"variant": self.variant, **asdict(self)}


@dataclass(frozen=True)
class MsrcrParams(_Params):
    """Classic MSRCR: scales, gain G, nonlinearity alpha, restoration gain beta, offset b."""

    sigma1: float
    sigma2: float
    sigma3: float
    gain: float
    alpha: float
    beta: float
    offset: float

    variant: ClassVar[str] = "msrcr"
    names: ClassVar[tuple[str, ...]] = ("sigma1", "sigma2", "sigma3", "gain", "alpha", "beta", "offset")

    def __post_init__(self):
        self._check_sigmas()


@dataclass(frozen=True)
class MsrmcrParams(_Params):
    """Modified color restoration: scales, restoration strength C, gain G, offset b."""

    sigma1: float
    sigma2: float
    sigma3: float
    c_strength: float
    gain: float
    offset: float

    variant: ClassVar[str] = "msrmcr"
    names: ClassVar[tuple[str, ...]] = ("sigma1", "sigma2", "sigma3", "c_strength", "gain", "offset")

    def __post_init__(self):
        self._check_sigmas()
        if not self.c_strength > 0:
            raise ValueError(f"c_strength must be positive, got {self.c_strength}")


RetinexParams = Union[MsrcrParams, MsrmcrParams]
PARAM_TYPES = {cls.variant: cls for cls in (MsrcrParams, MsrmcrParams)}

MSRMCR_DEFAULTS = MsrmcrParams(15.0, 120.0, 250.0, c_strength=100.0, gain=2.25, offset=-30.0)
MSRCR_DEFAULTS = MsrcrParams(15.0, 120.0, 250.0, gain=192.0, alpha=125.0, beta=46.0, offset=-30.0)


def params_from_dict(d: dict) -> RetinexParams:
    d = dict(d)
    cls = PARAM_TYPES[d.pop("variant")]
    return cls(**{n: float(d[n]) for n in cls.names})


def _check_nonnegative(plane):
    if np.any(plane < 0):
        raise ValueError("retinex input must be non-negative")


def _ssr_from_log(plane, log_plane, sigma):
    h, w = plane.shape
    blurred = surround_convolve(plane, gaussian_surround(sigma, w, h))
    return log_plane - np.log(blurred + 1.0)


def ssr(plane: np.ndarray, sigma: float) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.float64)
    _check_nonnegative(plane)
    return _ssr_from_log(plane, np.log(plane + 1.0), sigma)


def msr(plane: np.ndarray, sigmas, weights: ScaleWeights = DEFAULT_WEIGHTS) -> np.ndarray:
    """Weighted sum of single-scale outputs.

    Coincident scales are merged before convolving, so equal sigmas with
    weights summing to 1.0 reproduce :func:`ssr` bit for bit.
    """
    plane = np.asarray(plane, dtype=np.float64)
    _check_nonnegative(plane)
    if len(sigmas) != 3:
        raise ValueError("exactly three scales are expected")
    if any(b < a for a, b in zip(sigmas, sigmas[1:])):
        raise ValueError(f"sigmas must be ascending, got {tuple(sigmas)}")
    merged: dict[float, float] = {}
    for s, w in zip(sigmas, weights.as_tuple()):
        merged[float(s)] = merged.get(float(s), 0.0) + w
    log_plane = np.log(plane + 1.0)
    out = None
    for s, w in merged.items():
        term = w * _ssr_from_log(plane, log_plane, s)
        out = term if out is None else out + term
    return out


def _finish(planes, clamp):
    if clamp:
        planes = [np.clip(p, 0.0, 255.0) for p in planes]
    return RgbImage(*planes)


def msrcr(img: RgbImage, p: MsrcrParams, weights: ScaleWeights = DEFAULT_WEIGHTS,
          clamp: bool = True) -> RgbImage:
    log_total = np.log(img.r + img.g + img.b + 1.0)
    out = []
    for chan in img.planes:
        restoration = p.beta * (np.log(p.alpha * chan + 1.0) - log_total)
        out.append(p.gain * (restoration * msr(chan, p.sigmas, weights) + p.offset))
    return _finish(out, clamp)


def msr_range_map(plane: np.ndarray) -> np.ndarray:
    return plane * RANGE_SCALE + RANGE_OFFSET


def modified_color_restoration(img: RgbImage, c_strength: float) -> RgbImage:
    """Per-channel ``log2(1 + C * I_i / sum_j I_j)``; zero where the pixel is black."""
    if not c_strength > 0:
        raise ValueError(f"c_strength must be positive, got {c_strength}")
    total = img.r + img.g + img.b
    safe = np.where(total > 0, total, 1.0)
    planes = []
    for chan in img.planes:
        planes.append(np.where(total > 0, np.log2(1.0 + c_strength * (chan / safe)), 0.0))
    return RgbImage(*planes)


def msrmcr(img: RgbImage, p: MsrmcrParams, weights: ScaleWeights = DEFAULT_WEIGHTS,
           clamp: bool = True) -> RgbImage:
    restoration = modified_color_restoration(img, p.c_strength)
    out = []
    for chan, rest in zip(img.planes, restoration.planes):
        mapped = msr_range_map(msr(chan, p.sigmas, weights))
        scaled = rest * mapped / 255.0
        out.append(p.gain * (scaled + p.offset))
    return _finish(out, clamp)


def enhance(img: RgbImage, params: RetinexParams, weights: ScaleWeights = DEFAULT_WEIGHTS,
            clamp: bool = True) -> RgbImage:
    if isinstance(params, MsrmcrParams):
        return msrmcr(img, params, weights, clamp)
    if isinstance(params, MsrcrParams):
        return msrcr(img, params, weights, clamp)
    raise TypeError(f"unknown parameter type {type(params).__name__}")
