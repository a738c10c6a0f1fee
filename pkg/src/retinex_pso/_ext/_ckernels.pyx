# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: separable surround convolution and Sobel magnitude.

Boundaries use half-sample symmetric reflection (``d c b a | a b c d``),
repeated periodically when the kernel is wider than the plane.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline Py_ssize_t _reflect(Py_ssize_t i, Py_ssize_t n) nogil:
    cdef Py_ssize_t period = 2 * n
    i = i % period
    if i < 0:
        i += period
    if i >= n:
        i = period - 1 - i
    return i


cdef void _rows(const double[:, ::1] src, double[:, ::1] dst,
                const double[::1] taps, double[::1] buf) noexcept nogil:
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t r = (taps.shape[0] - 1) // 2
    cdef Py_ssize_t y, x, k
    cdef double acc
    for y in range(h):
        for x in range(w + 2 * r):
            buf[x] = src[y, _reflect(x - r, w)]
        for x in range(w):
            acc = taps[r] * buf[x + r]
            for k in range(1, r + 1):
                acc = acc + taps[r + k] * (buf[x + r - k] + buf[x + r + k])
            dst[y, x] = acc


cdef void _cols(const double[:, ::1] src, double[:, ::1] dst,
                const double[::1] taps) noexcept nogil:
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t r = (taps.shape[0] - 1) // 2
    cdef Py_ssize_t y, x, k, up, down
    cdef double t
    for y in range(h):
        t = taps[r]
        for x in range(w):
            dst[y, x] = t * src[y, x]
        for k in range(1, r + 1):
            t = taps[r + k]
            up = _reflect(y - k, h)
            down = _reflect(y + k, h)
            for x in range(w):
                dst[y, x] = dst[y, x] + t * (src[up, x] + src[down, x])


def convolve_separable(plane, taps):
    """Convolve ``plane`` with the symmetric 1-D ``taps`` along rows, then columns."""
    cdef const double[:, ::1] src = np.ascontiguousarray(plane, dtype=np.float64)
    cdef const double[::1] t = np.ascontiguousarray(taps, dtype=np.float64)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t r = (t.shape[0] - 1) // 2
    mid_arr = np.empty((h, w), dtype=np.float64)
    out_arr = np.empty((h, w), dtype=np.float64)
    buf_arr = np.empty(w + 2 * r, dtype=np.float64)
    cdef double[:, ::1] mid = mid_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] buf = buf_arr
    with nogil:
        _rows(src, mid, t, buf)
        _cols(mid, out, t)
    return out_arr


def sobel_magnitude(plane):
    """Gradient magnitude of the 3x3 Sobel pair with reflected borders."""
    cdef const double[:, ::1] src = np.ascontiguousarray(plane, dtype=np.float64)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, ym, yp, xm, xp
    cdef double gx, gy
    with nogil:
        for y in range(h):
            ym = _reflect(y - 1, h)
            yp = _reflect(y + 1, h)
            for x in range(w):
                xm = _reflect(x - 1, w)
                xp = _reflect(x + 1, w)
                gx = (src[ym, xp] + 2.0 * src[y, xp] + src[yp, xp]
                      - src[ym, xm] - 2.0 * src[y, xm] - src[yp, xm])
                gy = (src[yp, xm] + 2.0 * src[yp, x] + src[yp, xp]
                      - src[ym, xm] - 2.0 * src[ym, x] - src[ym, xp])
                out[y, x] = sqrt(gx * gx + gy * gy)
    return out_arr
