"""Hot-kernel backend, chosen once at import.

The compiled extension is preferred; set ``RETINEX_PSO_PURE=1`` to force the
numpy fallback. ``BACKEND`` names whichever is active.
"""
import os

from . import _pykernels

if os.environ.get("RETINEX_PSO_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "numpy"

convolve_separable = _impl.convolve_separable
sobel_magnitude = _impl.sobel_magnitude

__all__ = ["BACKEND", "convolve_separable", "sobel_magnitude"]
