"""Vectorized fallback for the frame-feature kernel.

Semantics must match ``_featcore.pyx`` exactly: per-pixel HSV with all three
channels on a 0-255 scale (hue = degrees * 255/360), averaged per frame in
float64. Branch order for hue ties is max==r, then max==g, then max==b.
"""

from __future__ import annotations

import numpy as np


def channel_means(frames: np.ndarray) -> np.ndarray:
    """Mean (hue, sat, value) per frame for uint8 frames shaped (n, 3, h, w)."""
    if frames.ndim != 4 or frames.shape[1] != 3:
        raise ValueError("frames must have shape (n, 3, h, w)")
    f = frames.astype(np.float64)
    r, g, b = f[:, 0], f[:, 1], f[:, 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn

    v = mx
    mx_safe = np.where(mx == 0.0, 1.0, mx)
    s = np.where(mx == 0.0, 0.0, 255.0 * delta / mx_safe)

    delta_safe = np.where(delta == 0.0, 1.0, delta)
    hue_r = ((g - b) / delta_safe) % 6.0
    hue_g = (b - r) / delta_safe + 2.0
    h_sixths = np.select(
        [delta == 0.0, mx == r, mx == g],
        [0.0, hue_r, hue_g],
        default=(r - g) / delta_safe + 4.0,
    )
    h = h_sixths * 60.0 * (255.0 / 360.0)

    return np.stack(
        [h.mean(axis=(1, 2)), s.mean(axis=(1, 2)), v.mean(axis=(1, 2))], axis=1
    )
