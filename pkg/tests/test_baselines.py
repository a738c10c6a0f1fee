import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from retinex_pso.baselines import histogram_equalize
from retinex_pso.image_io import RgbImage


def test_constant_goes_to_255():
    out = histogram_equalize(RgbImage.from_array(np.full((5, 5, 3), 40.0)))
    assert np.all(out.to_array() == 255.0)


def test_uniform_histogram_preserved():
    plane = np.arange(256, dtype=float).reshape(16, 16)
    out = histogram_equalize(RgbImage(plane, plane, plane))
    counts = np.bincount(out.r.astype(int).ravel(), minlength=256)
    # mapping v -> round(255 (v+1)/256) is monotone; every output level is hit at most twice
    levels = np.floor(255 * (np.arange(256) + 1) / 256 + 0.5)
    np.testing.assert_array_equal(out.r.ravel(), levels)
    assert counts.max() <= 2
    assert out.r.max() == 255.0


def test_two_level_image():
    plane = np.full((4, 4), 200.0)
    plane[0] = 10.0
    out = histogram_equalize(RgbImage(plane, plane, plane))
    assert set(np.unique(out.r)) == {64.0, 255.0}
    assert np.all(out.r[0] == 64.0)


def test_channels_independent():
    arr = np.zeros((2, 2, 3))
    arr[..., 0] = [[0, 50], [100, 150]]
    arr[..., 1] = 9.0
    out = histogram_equalize(RgbImage.from_array(arr)).to_array()
    assert out[..., 0].tolist() == [[64.0, 128.0], [191.0, 255.0]]
    assert np.all(out[..., 1] == 255.0)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.integers(0, 255).map(float)))
def test_monotone_integral_and_near_idempotent(plane):
    assume(len(np.unique(plane)) >= 2)
    out = histogram_equalize(RgbImage(plane, plane, plane)).r
    assert np.all(out == np.round(out)) and out.min() >= 0 and out.max() <= 255
    order = np.argsort(plane.ravel(), kind="stable")
    assert np.all(np.diff(out.ravel()[order]) >= 0)
    twice = histogram_equalize(RgbImage(out, out, out)).r
    assert np.abs(twice - out).max() <= 1
