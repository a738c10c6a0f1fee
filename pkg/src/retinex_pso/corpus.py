"""Bundled synthetic low-light test images.

The PNGs under ``data/`` are produced by :func:`synthetic_low_light` and can
be rebuilt with ``python -m retinex_pso.corpus``.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .image_io import RgbImage, load_image, save_image

CORPUS_NAMES = ("dim_office", "night_street", "shadowed_garden")
_SEEDS = {"dim_office": 11, "night_street": 23, "shadowed_garden": 37}


def synthetic_low_light(name: str, size: int = 64) -> RgbImage:
    """Dark, textured RGB scene: smooth illumination falloff over colored blocks and noise."""
    rng = np.random.default_rng(_SEEDS[name])
    yy, xx = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    cx, cy = rng.uniform(0.2, 0.8, size=2)
    illum = 0.08 + 0.35 * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / 0.08)
    reflect = np.empty((size, size, 3))
    reflect[:] = rng.uniform(0.3, 0.7, size=3)
    for _ in range(8):
        x0, y0 = rng.integers(0, size, size=2)
        w, h = rng.integers(size // 8, size // 2, size=2)
        reflect[y0:y0 + h, x0:x0 + w] = rng.uniform(0.1, 1.0, size=3)
    stripes = 0.1 * np.sin(2 * np.pi * xx * rng.integers(3, 9))
    reflect = np.clip(reflect + stripes[..., None], 0.0, 1.0)
    noise = rng.normal(0.0, 1.5, size=(size, size, 3))
    img = np.clip(255.0 * illum[..., None] * reflect + noise, 0.0, 255.0)
    return RgbImage.from_array(np.floor(img + 0.5))


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("retinex_pso") / "data" / f"{name}.png"))


def bundled_images() -> dict[str, RgbImage]:
    return {name: load_image(corpus_path(name)) for name in CORPUS_NAMES}


def main():
    out = Path(__file__).with_name("data")
    out.mkdir(exist_ok=True)
    for name in CORPUS_NAMES:
        save_image(synthetic_low_light(name), out / f"{name}.png")
        print(out / f"{name}.png")


if __name__ == "__main__":
    main()
