"""Numpy implementations of the hot kernels, used when the extension is absent."""
import numpy as np


def _fold_axis(padded, taps, axis, n):
    r = (len(taps) - 1) // 2

    def take(start):
        idx = [slice(None)] * padded.ndim
        idx[axis] = slice(start, start + n)
        return padded[tuple(idx)]

    out = taps[r] * take(r)
    for k in range(1, r + 1):
        out += taps[r + k] * (take(r - k) + take(r + k))
    return out


def convolve_separable(plane, taps):
    plane = np.asarray(plane, dtype=np.float64)
    taps = np.asarray(taps, dtype=np.float64)
    r = (len(taps) - 1) // 2
    h, w = plane.shape
    rows = np.pad(plane, ((0, 0), (r, r)), mode="symmetric")
    mid = _fold_axis(rows, taps, 1, w)
    cols = np.pad(mid, ((r, r), (0, 0)), mode="symmetric")
    return _fold_axis(cols, taps, 0, h)


def sobel_magnitude(plane):
    p = np.pad(np.asarray(plane, dtype=np.float64), 1, mode="symmetric")
    gx = (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    gy = (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    return np.sqrt(gx * gx + gy * gy)
