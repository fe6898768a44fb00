"""Aggregates per-frame detections into a per-video human-presence decision."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .model import DetectionFrame, RejectReason


@dataclass(frozen=True, slots=True)
class HumanPresenceSummary:
    video_id: str
    sampled: int
    person_frames: int

    @property
    def presence_ratio(self) -> float:
        return self.person_frames / self.sampled


def frame_has_person(frame: DetectionFrame, min_det_score: float) -> bool:
    return any(b.label == "person" and b.score >= min_det_score for b in frame.boxes)


def summarize_presence(detections: Sequence[DetectionFrame],
                       min_det_score: float) -> HumanPresenceSummary:
    """Count sampled frames that contain at least one confident person box."""
    if not 0.0 <= min_det_score <= 1.0:
        raise ValidationError("min_det_score must be in [0, 1]")
    if not detections:
        raise ValidationError("summarize_presence needs at least one detection frame")
    seen = set()
    person_frames = 0
    for frame in detections:
        if frame.frame_index in seen:
            raise ValidationError(
                f"{frame.video_id}: duplicate frame_index {frame.frame_index}"
            )
        seen.add(frame.frame_index)
        if frame_has_person(frame, min_det_score):
            person_frames += 1
    return HumanPresenceSummary(
        video_id=detections[0].video_id,
        sampled=len(detections),
        person_frames=person_frames,
    )


def qualifies(summary: HumanPresenceSummary, threshold: float) -> tuple[bool, RejectReason]:
    """Presence gate: passes iff presence_ratio >= threshold (inclusive)."""
    if not 0.0 < threshold <= 1.0:
        raise ValidationError("presence threshold must be in (0, 1]")
    if summary.presence_ratio >= threshold:
        return True, RejectReason.NONE
    return False, RejectReason.INSUFFICIENT_HUMANS


def expand_presence_flags(total_frames: int,
                          sampled: Sequence[tuple[int, bool]]) -> list[bool]:
    """Per-frame person flags; unsampled frames copy the nearest sampled frame
    (distance ties go to the lower index)."""
    if total_frames < 1:
        raise ValidationError("total_frames must be >= 1")
    if not sampled:
        raise ValidationError("cannot expand an empty presence sample")
    pairs = sorted(sampled)
    flags = [False] * total_frames
    cursor = 0
    for i in range(total_frames):
        while (
            cursor + 1 < len(pairs)
            and abs(pairs[cursor + 1][0] - i) < abs(pairs[cursor][0] - i)
        ):
            cursor += 1
        flags[i] = pairs[cursor][1]
    return flags
