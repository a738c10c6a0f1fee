"""Retinex color enhancement with particle-swarm parameter tuning."""
from ._ext import BACKEND
from .baselines import histogram_equalize
from .image_io import GrayImage, ImageFormatError, RgbImage, load_image, resize_bilinear, save_image, to_grayscale
from .objective import FitnessReport, fitness
from .pso import ParamBounds, SwarmConfig, TuneResult, default_bounds, tune
from .retinex import (
    MSRCR_DEFAULTS,
    MSRMCR_DEFAULTS,
    MsrcrParams,
    MsrmcrParams,
    ScaleWeights,
    enhance,
    msrcr,
    msrmcr,
)
from .wavelet import WEComparison, we_report

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GrayImage", "ImageFormatError", "RgbImage", "load_image", "save_image",
    "resize_bilinear", "to_grayscale", "histogram_equalize", "FitnessReport", "fitness",
    "ParamBounds", "SwarmConfig", "TuneResult", "default_bounds", "tune", "MSRCR_DEFAULTS",
    "MSRMCR_DEFAULTS", "MsrcrParams", "MsrmcrParams", "ScaleWeights", "enhance", "msrcr",
    "msrmcr", "WEComparison", "we_report",
]
