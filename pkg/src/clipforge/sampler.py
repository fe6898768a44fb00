"""Frame counting and uniform subsampling for detector input."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import MediaError, ValidationError
from .model import VideoAsset
from .rawvideo import read_header


@dataclass(frozen=True, slots=True)
class FrameIndexPlan:
    """Which frames of a video get sampled for detection."""

    video_id: str
    total_frames: int
    indices: tuple[int, ...]

    def __post_init__(self):
        if self.total_frames < 1:
            raise ValidationError(f"{self.video_id}: total_frames must be >= 1")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValidationError(f"{self.video_id}: plan indices must be strictly increasing")
        if self.indices and not 0 <= self.indices[0] <= self.indices[-1] < self.total_frames:
            raise ValidationError(f"{self.video_id}: plan indices outside [0, total_frames)")


def probe_frame_count(asset: VideoAsset, media_path: str | Path) -> tuple[int, bool]:
    """Frame count of the asset's media.

    Returns ``(count, exact)``: exact counts come from the container header;
    otherwise the count falls back to round(duration_s * frame_rate) and
    ``exact`` is False so the caller can flag the estimate.
    """
    info, _ = read_header(media_path)
    if info.frame_count is not None:
        return info.frame_count, True
    duration = info.duration_s if info.duration_s is not None else asset.duration_s
    count = round(duration * info.frame_rate)
    if count < 1:
        raise MediaError(f"{asset.video_id}: estimated frame count {count} < 1")
    return count, False


def plan_indices(total_frames: int, k: int) -> tuple[int, ...]:
    """Uniform sampling plan: floor(i * N / K) for i in 0..K-1, anchored at 0.

    When the video has no more than K frames, every frame is used.
    """
    if total_frames < 1:
        raise ValidationError("total_frames must be >= 1")
    if k < 1:
        raise ValidationError("sample count must be >= 1")
    if total_frames <= k:
        return tuple(range(total_frames))
    return tuple(i * total_frames // k for i in range(k))


def make_plan(asset: VideoAsset, media_path: str | Path, k: int) -> tuple[FrameIndexPlan, bool]:
    total, exact = probe_frame_count(asset, media_path)
    return FrameIndexPlan(asset.video_id, total, plan_indices(total, k)), exact


def write_frame_images(frames: np.ndarray, plan: FrameIndexPlan, frames_dir: str | Path) -> list[Path]:
    """Write sampled frames as ``frames/<video_id>/<index>.png`` for the detector."""
    out_dir = Path(frames_dir) / plan.video_id
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for row, idx in enumerate(plan.indices):
        img = Image.fromarray(np.transpose(frames[row], (1, 2, 0)), mode="RGB")
        dest = out_dir / f"{idx}.png"
        img.save(dest)
        paths.append(dest)
    return paths
