"""Dataset statistics: per-hashtag counts, duration histograms, report files.

All summaries run over accepted records (rejected records have no clip and
describe no dataset content) and are invariant under record order. The
duration histogram has two modes: ``post_trim`` (clip lengths, the default)
and ``pre_trim`` (source-scene lengths), covering both readings of a
"duration distribution" for a capped-length corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .model import DatasetManifest
from .scenes import longest_scene

COUNT_BUCKETS = [
    ("<200", 0, 200),
    ("200-400", 200, 400),
    ("400-600", 400, 600),
    ("600-800", 600, 800),
    ("800+", 800, float("inf")),
]

DURATION_BUCKETS = [
    ("3.5-5", 3.5, 5.0),
    ("5-10", 5.0, 10.0),
    ("10+", 10.0, float("inf")),
]


@dataclass(frozen=True)
class HashtagCountSummary:
    per_tag: dict[str, int]
    mean: float
    min_tag: tuple[str, int]
    max_tag: tuple[str, int]
    bucket_shares: dict[str, float]

    @property
    def total(self) -> int:
        return sum(self.per_tag.values())


@dataclass(frozen=True)
class DurationHistogram:
    mode: str
    buckets: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.buckets.values())

    def shares(self) -> dict[str, float]:
        total = self.total
        if total == 0:
            return {name: 0.0 for name in self.buckets}
        return {name: count / total for name, count in self.buckets.items()}


def summarize_hashtags(manifest: DatasetManifest) -> HashtagCountSummary:
    """Exact accepted-record counts per hashtag, mean to 1 decimal, and the
    share of tags in each count range (an implicit <200 bucket appears when
    tags fall below the lowest range)."""
    counts: dict[str, int] = {}
    for rec in manifest.records:
        if not rec.accepted:
            continue
        tag = manifest.assets[rec.video_id].hashtag
        counts[tag] = counts.get(tag, 0) + 1
    if not counts:
        raise ValidationError("cannot summarize an empty manifest")

    # min/max ties resolve to the lexicographically smaller tag
    min_tag = min(counts, key=lambda t: (counts[t], t))
    max_tag = max(counts, key=lambda t: (counts[t],))
    for tag in sorted(counts):
        if counts[tag] == counts[max_tag]:
            max_tag = tag
            break
    mean = round(sum(counts.values()) / len(counts), 1)

    shares = {}
    n_tags = len(counts)
    for name, lo, hi in COUNT_BUCKETS:
        in_bucket = sum(1 for c in counts.values() if lo <= c < hi)
        if in_bucket or name != "<200":
            shares[name] = in_bucket / n_tags
    return HashtagCountSummary(
        per_tag=dict(sorted(counts.items())),
        mean=mean,
        min_tag=(min_tag, counts[min_tag]),
        max_tag=(max_tag, counts[max_tag]),
        bucket_shares=shares,
    )


def duration_histogram(manifest: DatasetManifest, mode: str = "post_trim") -> DurationHistogram:
    """Accepted-record counts in half-open duration buckets [3.5,5), [5,10), [10,inf).

    ``post_trim`` buckets clip lengths; ``pre_trim`` buckets the length of
    each record's source scene (the video's longest scene).
    """
    if mode not in ("post_trim", "pre_trim"):
        raise ValidationError(f"unknown histogram mode {mode!r}")
    buckets = {name: 0 for name, _, _ in DURATION_BUCKETS}
    for rec in manifest.records:
        if not rec.accepted:
            continue
        if mode == "post_trim":
            duration = rec.clip_length_s
        else:
            asset = manifest.assets[rec.video_id]
            if not asset.scenes:
                raise ValidationError(
                    f"{rec.video_id}: no scene annotations for pre_trim histogram"
                )
            scene = longest_scene(asset.scenes)
            duration = scene.duration_s(asset.frame_rate)
        if duration < 3.5 - 1e-9:
            raise ValidationError(
                f"{rec.video_id}: accepted record with {mode} duration {duration:.3f}s < 3.5s"
            )
        for name, lo, hi in DURATION_BUCKETS:
            if lo <= duration < hi:
                buckets[name] += 1
                break
    return DurationHistogram(mode=mode, buckets=buckets)


def emit_report(dest_dir: str | Path,
                summary: HashtagCountSummary | None,
                histograms: list[DurationHistogram]) -> list[Path]:
    """Write ``stats.v1`` plus plot-ready ``per_tag.csv`` and ``buckets.csv``.

    ``summary=None`` (empty corpus) writes explicit zero totals. Identical
    inputs produce byte-identical files.
    """
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)

    payload = {
        "format": "stats.v1",
        "total_accepted": summary.total if summary else 0,
        "hashtags": None,
        "durations": {
            h.mode: {
                "buckets": h.buckets,
                "shares": {k: f"{v:.6f}" for k, v in h.shares().items()},
                "total": h.total,
            }
            for h in histograms
        },
    }
    if summary:
        payload["hashtags"] = {
            "tags": len(summary.per_tag),
            "mean": f"{summary.mean:.1f}",
            "min": {"tag": summary.min_tag[0], "count": summary.min_tag[1]},
            "max": {"tag": summary.max_tag[0], "count": summary.max_tag[1]},
            "bucket_shares": {k: f"{v:.6f}" for k, v in summary.bucket_shares.items()},
        }

    stats_path = dest_dir / "stats.v1"
    stats_path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    per_tag_path = dest_dir / "per_tag.csv"
    lines = ["tag,count"]
    if summary:
        lines.extend(f"{tag},{count}" for tag, count in summary.per_tag.items())
    per_tag_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    buckets_path = dest_dir / "buckets.csv"
    lines = ["range,share"]
    if summary:
        lines.extend(f"{name},{share:.6f}" for name, share in summary.bucket_shares.items())
    buckets_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    return [stats_path, per_tag_path, buckets_path]
