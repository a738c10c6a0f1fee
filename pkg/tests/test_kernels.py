import numpy as np
import pytest

from retinex_pso import _ext
from retinex_pso._ext import _pykernels
from retinex_pso.retinex import gaussian_surround

from oracles import conv2d_bruteforce, reflect, sobel_scalar

try:
    from retinex_pso._ext import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="numpy"),
            pytest.param(_ckernels, id="cython",
                         marks=pytest.mark.skipif(_ckernels is None, reason="extension not built"))]


def test_reflect_oracle_matches_numpy_pad():
    n = 4
    padded = np.pad(np.arange(n), 11, mode="symmetric")
    assert [reflect(i, n) for i in range(-11, n + 11)] == padded.tolist()


def test_backend_name():
    assert _ext.BACKEND in ("cython", "numpy")


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("shape, sigma", [((5, 5), 1.0), ((3, 7), 2.0), ((6, 2), 40.0), ((1, 1), 3.0)])
def test_convolution_matches_bruteforce(mod, rng, shape, sigma):
    plane = rng.random(shape) * 255
    s = gaussian_surround(sigma, shape[1], shape[0])
    expected = np.array(conv2d_bruteforce(plane.tolist(), s.taps.tolist()))
    np.testing.assert_allclose(mod.convolve_separable(plane, s.taps), expected, rtol=0, atol=1e-10)


@pytest.mark.parametrize("mod", BACKENDS)
def test_sobel_matches_stencil(mod, rng):
    plane = rng.random((4, 6)) * 255
    np.testing.assert_allclose(mod.sobel_magnitude(plane), sobel_scalar(plane.tolist()), rtol=0, atol=1e-10)


@pytest.mark.skipif(_ckernels is None, reason="extension not built")
def test_backends_agree(rng):
    plane = rng.random((37, 29)) * 255
    s = gaussian_surround(12.5, 29, 37)
    np.testing.assert_allclose(_ckernels.convolve_separable(plane, s.taps),
                               _pykernels.convolve_separable(plane, s.taps), rtol=0, atol=1e-9)
    np.testing.assert_allclose(_ckernels.sobel_magnitude(plane), _pykernels.sobel_magnitude(plane),
                               rtol=0, atol=1e-9)


@pytest.mark.parametrize("mod", BACKENDS)
def test_non_contiguous_input(mod, rng):
    plane = (rng.random((10, 12)) * 255)[:, ::2]
    s = gaussian_surround(1.5, 6, 10)
    np.testing.assert_allclose(mod.convolve_separable(plane, s.taps),
                               conv2d_bruteforce(plane.tolist(), s.taps.tolist()), atol=1e-10)
