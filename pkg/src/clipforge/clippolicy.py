"""Duration policy for the longest scene of each video.

Scenes shorter than the minimum are rejected; scenes within [min, max] are
taken whole; longer scenes are trimmed to the max-length window holding the
most person-positive frames (the only relevance signal the pipeline has).
Window candidates step on a 0.5-second grid from the scene start; a frame
belongs to window [a, b] when a <= t_frame <= b. Ties go to the earliest
start.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .humanfilter import HumanPresenceSummary, expand_presence_flags, qualifies
from .model import (
    ClipRecord,
    PipelineConfig,
    RejectReason,
    SceneSpan,
    VideoAsset,
    q3,
    q6,
)
from .scenes import longest_scene

WINDOW_STEP_S = 0.5


@dataclass(frozen=True, slots=True)
class ClipDecision:
    accepted: bool
    clip_start_s: float | None
    clip_end_s: float | None
    reject_reason: RejectReason


def _window_person_count(presence: Sequence[bool], scene: SceneSpan,
                         lo_frame: float, hi_frame: float) -> int:
    # frame-domain bounds (seconds * fps) keep boundary comparisons exact for
    # the usual dyadic frame rates
    count = 0
    for idx in range(scene.start_frame, scene.end_frame):
        if lo_frame <= idx <= hi_frame and presence[idx]:
            count += 1
    return count


def apply_duration_policy(scene: SceneSpan, frame_rate: float,
                          presence: Sequence[bool],
                          min_clip_s: float = 3.5,
                          max_clip_s: float = 10.0) -> ClipDecision:
    """Decide the clip bounds for one scene given per-frame person flags."""
    if frame_rate <= 0:
        raise ValidationError("frame_rate must be > 0")
    if not presence:
        raise ValidationError("presence vector is empty")
    if len(presence) < scene.end_frame:
        raise ValidationError("presence flags do not cover the scene's frames")

    scene_start_s = scene.start_frame / frame_rate
    scene_len_s = scene.length / frame_rate

    if scene_len_s < min_clip_s:
        return ClipDecision(False, None, None, RejectReason.TOO_SHORT)
    if scene_len_s <= max_clip_s:
        return ClipDecision(True, scene_start_s, scene_start_s + scene_len_s,
                            RejectReason.NONE)

    steps = int((scene_len_s - max_clip_s) / WINDOW_STEP_S + 1e-9)
    step_frames = WINDOW_STEP_S * frame_rate
    window_frames = max_clip_s * frame_rate
    best_k = 0
    best_count = -1
    for k in range(steps + 1):
        lo = scene.start_frame + k * step_frames
        if lo + window_frames > scene.end_frame + 1e-6:
            break
        count = _window_person_count(presence, scene, lo, lo + window_frames)
        if count > best_count:
            best_count = count
            best_k = k
    best_start = scene_start_s + best_k * WINDOW_STEP_S
    return ClipDecision(True, best_start, best_start + max_clip_s, RejectReason.NONE)


def _record(asset: VideoAsset, decision: ClipDecision, ratio: float) -> ClipRecord:
    return ClipRecord(
        video_id=asset.video_id,
        clip_start_s=None if decision.clip_start_s is None else q3(decision.clip_start_s),
        clip_end_s=None if decision.clip_end_s is None else q3(decision.clip_end_s),
        presence_ratio=q6(ratio),
        accepted=decision.accepted,
        reject_reason=decision.reject_reason,
    )


def _reject(asset: VideoAsset, reason: RejectReason, ratio: float = 0.0) -> ClipRecord:
    return _record(asset, ClipDecision(False, None, None, reason), ratio)


def decide_video(asset: VideoAsset, spans: Sequence[SceneSpan],
                 summary: HumanPresenceSummary | None,
                 presence: Sequence[bool] | None,
                 config: PipelineConfig) -> ClipRecord:
    """Compose the gates for one video: permission, presence, duration.

    The first failing gate sets the reject reason; non-permitted videos are
    rejected before any media-derived input is touched.
    """
    if not asset.download_permitted:
        return _reject(asset, RejectReason.NO_PERMISSION)
    if not spans:
        raise ValidationError(f"{asset.video_id}: no scene spans")
    if summary is None or presence is None:
        raise ValidationError(f"{asset.video_id}: missing presence data for permitted video")

    scene = longest_scene(spans)
    ok, reason = qualifies(summary, config.presence_threshold)
    if not ok:
        return _reject(asset, reason, summary.presence_ratio)
    decision = apply_duration_policy(scene, asset.frame_rate, presence,
                                     config.min_clip_s, config.max_clip_s)
    return _record(asset, decision, summary.presence_ratio)


def decide_from_annotations(asset: VideoAsset, config: PipelineConfig) -> ClipRecord:
    """decide_video using the scene/presence annotations carried on the asset."""
    if not asset.download_permitted:
        return _reject(asset, RejectReason.NO_PERMISSION)
    if not asset.scenes:
        raise ValidationError(f"{asset.video_id}: asset has no scene annotations (run scan)")
    if not asset.presence:
        raise ValidationError(f"{asset.video_id}: asset has no presence annotations (run filter)")
    total_frames = asset.scenes[-1].end_frame
    summary = HumanPresenceSummary(
        video_id=asset.video_id,
        sampled=len(asset.presence),
        person_frames=sum(1 for _, flag in asset.presence if flag),
    )
    presence = expand_presence_flags(total_frames, asset.presence)
    return decide_video(asset, list(asset.scenes), summary, presence, config)
