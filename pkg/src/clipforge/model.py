"""Domain types and pipeline configuration shared by every stage.

All types are immutable values after construction and safe to share across
concurrent workers. Seconds are stored with exactly 3 fractional digits and
ratios with 6, so manifests round-trip byte-identically; use :func:`q3` /
:func:`q6` when constructing values by hand.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, ValidationError

# Slack for float dust when checking decimal-quantized durations.
EPS = 1e-9


def q3(x: float) -> float:
    """Quantize to 3 decimal places (millisecond precision)."""
    return float(f"{x:.3f}")


def q6(x: float) -> float:
    """Quantize to 6 decimal places (ratio precision)."""
    return float(f"{x:.6f}")


class RejectReason(enum.Enum):
    NONE = "none"
    TOO_SHORT = "too_short"
    INSUFFICIENT_HUMANS = "insufficient_humans"
    NO_PERMISSION = "no_permission"


@dataclass(frozen=True, slots=True)
class SceneSpan:
    """A detected scene: frame interval [start_frame, end_frame)."""

    start_frame: int
    end_frame: int

    def __post_init__(self):
        if self.start_frame < 0:
            raise ValidationError(f"scene start_frame {self.start_frame} < 0")
        if self.end_frame <= self.start_frame:
            raise ValidationError(
                f"scene end_frame {self.end_frame} <= start_frame {self.start_frame}"
            )

    @property
    def length(self) -> int:
        return self.end_frame - self.start_frame

    def duration_s(self, frame_rate: float) -> float:
        return self.length / frame_rate


@dataclass(frozen=True, slots=True)
class VideoAsset:
    """One source video with identity, metadata, and media location.

    ``media_path`` is empty for assets whose media was never fetched (e.g.
    download permission was not granted). ``scenes`` and ``presence`` are
    stage annotations: detected scene spans and, per sampled frame index,
    whether a person was detected (already thresholded by ``min_det_score``).
    """

    video_id: str
    hashtag: str
    duration_s: float
    frame_rate: float
    media_path: str = ""
    download_permitted: bool = False
    source_meta: dict[str, str] = field(default_factory=dict)
    scenes: tuple[SceneSpan, ...] = ()
    presence: tuple[tuple[int, bool], ...] = ()

    def __post_init__(self):
        if not self.video_id:
            raise ValidationError("video_id must be non-empty")
        if self.duration_s <= 0:
            raise ValidationError(f"{self.video_id}: duration_s must be > 0")
        if self.frame_rate <= 0:
            raise ValidationError(f"{self.video_id}: frame_rate must be > 0")
        if self.hashtag.startswith("#"):
            raise ValidationError(f"{self.video_id}: hashtag not normalized (leading '#')")

    def validate_annotations(self) -> None:
        """Check scene spans partition [0, N) and presence indices are sorted."""
        prev_end = 0
        for span in self.scenes:
            if span.start_frame != prev_end:
                raise ValidationError(
                    f"{self.video_id}: scene spans not contiguous at frame {span.start_frame}"
                )
            prev_end = span.end_frame
        last = -1
        for idx, flag in self.presence:
            if idx <= last:
                raise ValidationError(f"{self.video_id}: presence indices not increasing")
            if not isinstance(flag, bool):
                raise ValidationError(f"{self.video_id}: presence flag must be boolean")
            last = idx


@dataclass(frozen=True, slots=True)
class ClipRecord:
    """A per-video clip decision: either an accepted trimmed clip or a reject.

    Accepted records carry clip bounds with length in [3.5, 10.0] seconds;
    rejected records carry no bounds and a non-``none`` reject reason.
    """

    video_id: str
    clip_start_s: float | None
    clip_end_s: float | None
    presence_ratio: float
    accepted: bool
    reject_reason: RejectReason

    def __post_init__(self):
        if not self.video_id:
            raise ValidationError("record video_id must be non-empty")
        if not 0.0 <= self.presence_ratio <= 1.0:
            raise ValidationError(f"{self.video_id}: presence_ratio outside [0, 1]")
        if self.accepted:
            if self.reject_reason is not RejectReason.NONE:
                raise ValidationError(f"{self.video_id}: accepted record with reject_reason")
            if self.clip_start_s is None or self.clip_end_s is None:
                raise ValidationError(f"{self.video_id}: accepted record without clip bounds")
        else:
            if self.reject_reason is RejectReason.NONE:
                raise ValidationError(f"{self.video_id}: rejected record without reject_reason")
            if self.clip_start_s is not None or self.clip_end_s is not None:
                raise ValidationError(f"{self.video_id}: rejected record with clip bounds")

    @property
    def clip_length_s(self) -> float | None:
        if self.clip_start_s is None or self.clip_end_s is None:
            return None
        return self.clip_end_s - self.clip_start_s


@dataclass(frozen=True, slots=True)
class ProvenanceEntry:
    """One pipeline-stage log entry. ``ts`` is a logical clock, not wall time,
    so reruns on identical inputs produce byte-identical manifests."""

    stage: str
    config_digest: str
    ts: int


@dataclass(frozen=True, slots=True)
class DetectionBox:
    x: float
    y: float
    w: float
    h: float
    label: str
    score: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValidationError("detection box must have positive width and height")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError("detection score outside [0, 1]")


@dataclass(frozen=True, slots=True)
class DetectionFrame:
    """Object-detection output for one sampled frame."""

    video_id: str
    frame_index: int
    boxes: tuple[DetectionBox, ...]


# Config keys, their types, and defaults. Unknown keys in config files are
# rejected rather than ignored.
_CONFIG_FIELDS = {
    "cut_threshold": (float, 27.0),
    "min_scene_len_frames": (int, 15),
    "sample_count": (int, 10),
    "presence_threshold": (float, 0.5),
    "min_clip_s": (float, 3.5),
    "max_clip_s": (float, 10.0),
    "min_views": (int, 5_000_000),
    "per_hashtag_cap": (int, 900),
    "min_det_score": (float, 0.25),
    "rate_capacity": (int, 20),
    "rate_refill_per_s": (float, 10.0),
    "decoder_cmd": (str, ""),
}


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    """Tunable knobs for every stage; see README for the config file schema."""

    cut_threshold: float = 27.0
    min_scene_len_frames: int = 15
    sample_count: int = 10
    presence_threshold: float = 0.5
    min_clip_s: float = 3.5
    max_clip_s: float = 10.0
    min_views: int = 5_000_000
    per_hashtag_cap: int = 900
    min_det_score: float = 0.25
    rate_capacity: int = 20
    rate_refill_per_s: float = 10.0
    decoder_cmd: str = ""

    def __post_init__(self):
        for name in (
            "cut_threshold",
            "min_scene_len_frames",
            "sample_count",
            "min_clip_s",
            "max_clip_s",
            "min_views",
            "per_hashtag_cap",
            "rate_capacity",
            "rate_refill_per_s",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"config field {name} must be positive")
        if not 0.0 < self.presence_threshold <= 1.0:
            raise ConfigError("config field presence_threshold must be in (0, 1]")
        if not 0.0 <= self.min_det_score <= 1.0:
            raise ConfigError("config field min_det_score must be in [0, 1]")
        if self.min_clip_s >= self.max_clip_s:
            raise ConfigError("config field min_clip_s must be < max_clip_s")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        kwargs = {}
        for key, value in data.items():
            if key not in _CONFIG_FIELDS:
                raise ConfigError(f"unknown config key: {key}")
            typ, _ = _CONFIG_FIELDS[key]
            if typ is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"config field {key} must be an integer")
            elif typ is float:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"config field {key} must be a number")
                value = float(value)
            elif not isinstance(value, typ):
                raise ConfigError(f"config field {key} must be {typ.__name__}")
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        """Load a JSON config file; unknown keys are rejected."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _CONFIG_FIELDS}

    def digest(self) -> str:
        """Stable 12-hex digest of the config, recorded in provenance."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass
class DatasetManifest:
    """Ordered collection of clip records plus their source assets and the
    provenance of every pipeline stage that touched them.

    ``base_dir`` is where the manifest was read from (or will be written to);
    relative ``media_path`` values resolve against it.
    """

    records: list[ClipRecord] = field(default_factory=list)
    assets: dict[str, VideoAsset] = field(default_factory=dict)
    provenance: list[ProvenanceEntry] = field(default_factory=list)
    base_dir: Path | None = field(default=None, compare=False)

    def validate(self) -> None:
        """Enforce every manifest invariant; raises ManifestError on breach."""
        from .manifest import validate_manifest

        validate_manifest(self)

    def latest_ts(self) -> int:
        return self.provenance[-1].ts if self.provenance else -1

    def next_ts(self) -> int:
        return self.latest_ts() + 1

    def with_stage(self, stage: str, config_digest: str) -> "DatasetManifest":
        """Copy with one appended provenance entry."""
        return DatasetManifest(
            records=list(self.records),
            assets=dict(self.assets),
            provenance=[*self.provenance, ProvenanceEntry(stage, config_digest, self.next_ts())],
            base_dir=self.base_dir,
        )

    def resolve_media_path(self, asset: VideoAsset) -> Path | None:
        if not asset.media_path:
            return None
        p = Path(asset.media_path)
        if p.is_absolute() or self.base_dir is None:
            return p
        return self.base_dir / p

    def accepted_records(self) -> list[ClipRecord]:
        return [r for r in self.records if r.accepted]
