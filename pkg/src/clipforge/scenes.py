"""Content-based shot-boundary detection and longest-scene selection.

A cut is declared between consecutive frames when the mean absolute change
of the per-frame hue/saturation/luma means exceeds a threshold, subject to
a minimum scene length. Per-channel means (not histograms) are a deliberate
v1 choice: enough for hard cuts, O(1) per pixel; gradual fades are a known
limitation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .features import FrameFeature, frame_features
from .model import PipelineConfig, SceneSpan


@dataclass(frozen=True, slots=True)
class ContentScore:
    """Dissimilarity between frame ``frame_index - 1`` and ``frame_index``."""

    frame_index: int
    score: float


def compute_content_scores(features: Sequence[FrameFeature]) -> list[ContentScore]:
    """Score every consecutive frame pair: (|dHue| + |dSat| + |dLuma|) / 3."""
    if len(features) < 2:
        raise ValidationError("need at least 2 frames to score content change")
    scores = []
    prev = features[0]
    for feat in features[1:]:
        if feat.frame_index <= prev.frame_index:
            raise ValidationError("frame indices must be strictly increasing")
        score = (
            abs(feat.mean_hue - prev.mean_hue)
            + abs(feat.mean_sat - prev.mean_sat)
            + abs(feat.mean_luma - prev.mean_luma)
        ) / 3.0
        scores.append(ContentScore(feat.frame_index, score))
        prev = feat
    return scores


def detect_cuts(scores: Sequence[ContentScore], cut_threshold: float,
                min_scene_len_frames: int) -> list[int]:
    """Frame indices where new scenes start.

    A cut lands at index i iff score_i exceeds the threshold and i is at
    least ``min_scene_len_frames`` past the previous cut (or video start).
    """
    if cut_threshold <= 0:
        raise ValidationError("cut_threshold must be > 0")
    if min_scene_len_frames < 1:
        raise ValidationError("min_scene_len_frames must be >= 1")
    cuts: list[int] = []
    last_cut = 0
    prev_index = 0
    for item in scores:
        if item.frame_index <= prev_index:
            raise ValidationError("scores must be ordered by frame_index")
        prev_index = item.frame_index
        if item.score > cut_threshold and item.frame_index - last_cut >= min_scene_len_frames:
            cuts.append(item.frame_index)
            last_cut = item.frame_index
    return cuts


def scenes_from_cuts(total_frames: int, cuts: Sequence[int]) -> list[SceneSpan]:
    """Partition [0, total_frames) at the cut indices; k cuts -> k+1 spans."""
    if total_frames < 1:
        raise ValidationError("total_frames must be >= 1")
    prev = 0
    spans = []
    for cut in cuts:
        if not 0 < cut < total_frames:
            raise ValidationError(f"cut {cut} outside (0, {total_frames})")
        if cut <= prev:
            raise ValidationError("cuts must be strictly increasing")
        spans.append(SceneSpan(prev, cut))
        prev = cut
    spans.append(SceneSpan(prev, total_frames))
    return spans


def longest_scene(spans: Sequence[SceneSpan]) -> SceneSpan:
    """The span with maximum length; ties go to the earliest start."""
    if not spans:
        raise ValidationError("longest_scene needs a non-empty span list")
    best = spans[0]
    for span in spans[1:]:
        if span.length > best.length:
            best = span
    return best


def detect_scenes(frames: np.ndarray, config: PipelineConfig,
                  impl: str | None = None) -> list[SceneSpan]:
    """Full pass over decoded frames: features -> scores -> cuts -> spans."""
    total = frames.shape[0]
    if total == 1:
        return [SceneSpan(0, 1)]
    feats = frame_features(frames, impl=impl)
    scores = compute_content_scores(feats)
    cuts = detect_cuts(scores, config.cut_threshold, config.min_scene_len_frames)
    return scenes_from_cuts(total, cuts)
