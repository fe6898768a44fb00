# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled frame-feature kernel: per-frame HSV channel means.

This is the per-pixel hot loop of the scan stage. Semantics are locked to
``_featpy.channel_means`` (hue scaled to 0-255, float64 accumulation,
max==r / max==g / max==b branch order); the fallback-equivalence test keeps
the two implementations honest.
"""

import numpy as np


def channel_means(const unsigned char[:, :, :, ::1] frames):
    """Mean (hue, sat, value) per frame for uint8 frames shaped (n, 3, h, w)."""
    cdef Py_ssize_t n = frames.shape[0]
    cdef Py_ssize_t h = frames.shape[2]
    cdef Py_ssize_t w = frames.shape[3]
    if frames.shape[1] != 3:
        raise ValueError("frames must have shape (n, 3, h, w)")

    out = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, y, x
    cdef double r, g, b, mx, mn, delta, hue, sat
    cdef double sum_h, sum_s, sum_v
    cdef double npix = <double>(h * w)

    with nogil:
        for i in range(n):
            sum_h = 0.0
            sum_s = 0.0
            sum_v = 0.0
            for y in range(h):
                for x in range(w):
                    r = <double>frames[i, 0, y, x]
                    g = <double>frames[i, 1, y, x]
                    b = <double>frames[i, 2, y, x]
                    mx = r
                    if g > mx:
                        mx = g
                    if b > mx:
                        mx = b
                    mn = r
                    if g < mn:
                        mn = g
                    if b < mn:
                        mn = b
                    delta = mx - mn
                    if delta == 0.0:
                        hue = 0.0
                    elif mx == r:
                        hue = (g - b) / delta
                        hue = hue - 6.0 * (<long long>(hue / 6.0))
                        if hue < 0.0:
                            hue += 6.0
                    elif mx == g:
                        hue = (b - r) / delta + 2.0
                    else:
                        hue = (r - g) / delta + 4.0
                    if mx == 0.0:
                        sat = 0.0
                    else:
                        sat = 255.0 * delta / mx
                    sum_h += hue * 60.0 * (255.0 / 360.0)
                    sum_s += sat
                    sum_v += mx
            o[i, 0] = sum_h / npix
            o[i, 1] = sum_s / npix
            o[i, 2] = sum_v / npix
    return out
