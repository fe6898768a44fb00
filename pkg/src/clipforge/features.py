"""Frame-feature extraction with compiled/pure-Python kernel selection.

The compiled Cython kernel is used when it was built; otherwise (or when
``CLIPFORGE_PURE_PYTHON`` is set) the numpy fallback takes over. Both
produce the same numbers; ``benchmarks/bench_features.py`` compares their
throughput.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _featpy
from .errors import ValidationError

try:
    from . import _featcore
except ImportError:  # extension not built
    _featcore = None

if os.environ.get("CLIPFORGE_PURE_PYTHON"):
    _featcore = None


def active_kernel() -> str:
    return "compiled" if _featcore is not None else "python"


def channel_means(frames: np.ndarray, impl: str | None = None) -> np.ndarray:
    """Per-frame mean (hue, sat, value) on a 0-255 scale.

    ``impl`` forces a kernel ("compiled" or "python"); default is the best
    available one.
    """
    if impl == "compiled" or (impl is None and _featcore is not None):
        if _featcore is None:
            raise ValidationError("compiled kernel requested but not built")
        return np.asarray(_featcore.channel_means(np.ascontiguousarray(frames)))
    return _featpy.channel_means(frames)


@dataclass(frozen=True, slots=True)
class FrameFeature:
    """Per-frame channel means used for content-change scoring."""

    frame_index: int
    mean_hue: float
    mean_sat: float
    mean_luma: float


def downscale(frames: np.ndarray, max_width: int = 256) -> np.ndarray:
    """Stride-subsample frames so width <= max_width (cheap, deterministic)."""
    width = frames.shape[3]
    if width <= max_width:
        return frames
    stride = -(-width // max_width)
    return frames[:, :, ::stride, ::stride]


def frame_features(frames: np.ndarray, start_index: int = 0,
                   impl: str | None = None) -> list[FrameFeature]:
    """Features for a frame block; indices start at ``start_index``."""
    means = channel_means(downscale(frames), impl=impl)
    return [
        FrameFeature(start_index + i, float(m[0]), float(m[1]), float(m[2]))
        for i, m in enumerate(means)
    ]
