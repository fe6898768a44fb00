"""Line-oriented manifest file format (``clipforge-manifest v1``).

The format is streaming-friendly so stages never hold whole corpora in
memory while writing: a header line, then one JSON object per line with a
``"t"`` discriminator, in a fixed section order:

1. ``prov`` entries, ascending logical timestamp;
2. ``asset`` lines, sorted by ``video_id``;
3. ``rec`` lines, sorted by ``(video_id, clip_start_s)``.

The writer formats every line itself (fixed key order, seconds with exactly
3 fractional digits, ratios with 6) so identical manifests serialize to
identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FileAccessError, ManifestError, ValidationError
from .model import (
    EPS,
    ClipRecord,
    DatasetManifest,
    ProvenanceEntry,
    RejectReason,
    SceneSpan,
    VideoAsset,
    q3,
    q6,
)

HEADER = "clipforge-manifest v1"

_REASONS = {r.value for r in RejectReason}


def _record_sort_key(rec: ClipRecord) -> tuple:
    start = rec.clip_start_s if rec.clip_start_s is not None else float("-inf")
    return (rec.video_id, start)


def validate_manifest(m: DatasetManifest) -> None:
    """Check all manifest invariants, naming the offending video_id."""
    for vid, asset in m.assets.items():
        if vid != asset.video_id:
            raise ManifestError(f"asset keyed {vid!r} carries video_id {asset.video_id!r}")
        if asset.duration_s != q3(asset.duration_s):
            raise ManifestError(f"{vid}: duration_s not quantized to 3 decimals")
        if asset.frame_rate != q3(asset.frame_rate):
            raise ManifestError(f"{vid}: frame_rate not quantized to 3 decimals")
        asset.validate_annotations()

    prev_key = None
    seen_keys = set()
    for rec in m.records:
        if rec.video_id not in m.assets:
            raise ManifestError(f"record {rec.video_id} has no matching asset")
        if rec.presence_ratio != q6(rec.presence_ratio):
            raise ManifestError(f"{rec.video_id}: presence_ratio not quantized to 6 decimals")
        if rec.accepted:
            length = rec.clip_end_s - rec.clip_start_s
            if not (3.5 - EPS <= length <= 10.0 + EPS):
                raise ManifestError(
                    f"{rec.video_id}: accepted clip length {length:.3f}s outside [3.5, 10.0]"
                )
            for value in (rec.clip_start_s, rec.clip_end_s):
                if value != q3(value):
                    raise ManifestError(f"{rec.video_id}: clip bound not quantized to 3 decimals")
        key = _record_sort_key(rec)
        if prev_key is not None and key < prev_key:
            raise ManifestError(f"records not sorted (at video_id {rec.video_id})")
        if key in seen_keys:
            raise ManifestError(f"duplicate record key (video_id {rec.video_id})")
        seen_keys.add(key)
        prev_key = key

    prev_ts = -1
    for entry in m.provenance:
        if entry.ts <= prev_ts:
            raise ManifestError(f"provenance timestamps not increasing at stage {entry.stage!r}")
        prev_ts = entry.ts


def _fmt_asset(asset: VideoAsset) -> str:
    parts = [
        '"t":"asset"',
        f'"video_id":{json.dumps(asset.video_id)}',
        f'"hashtag":{json.dumps(asset.hashtag)}',
        f'"duration_s":{asset.duration_s:.3f}',
        f'"frame_rate":{asset.frame_rate:.3f}',
        f'"media_path":{json.dumps(asset.media_path)}',
        f'"download_permitted":{"true" if asset.download_permitted else "false"}',
    ]
    if asset.source_meta:
        meta = json.dumps(asset.source_meta, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        parts.append(f'"meta":{meta}')
    if asset.scenes:
        spans = ",".join(f"[{s.start_frame},{s.end_frame}]" for s in asset.scenes)
        parts.append(f'"scenes":[{spans}]')
    if asset.presence:
        pairs = ",".join(f"[{i},{1 if flag else 0}]" for i, flag in asset.presence)
        parts.append(f'"presence":[{pairs}]')
    return "{" + ",".join(parts) + "}"


def _fmt_record(rec: ClipRecord) -> str:
    start = "null" if rec.clip_start_s is None else f"{rec.clip_start_s:.3f}"
    end = "null" if rec.clip_end_s is None else f"{rec.clip_end_s:.3f}"
    return (
        "{"
        f'"t":"rec","video_id":{json.dumps(rec.video_id)},'
        f'"clip_start_s":{start},"clip_end_s":{end},'
        f'"presence_ratio":{rec.presence_ratio:.6f},'
        f'"accepted":{"true" if rec.accepted else "false"},'
        f'"reject_reason":{json.dumps(rec.reject_reason.value)}'
        "}"
    )


def _fmt_prov(entry: ProvenanceEntry) -> str:
    return (
        "{"
        f'"t":"prov","stage":{json.dumps(entry.stage)},'
        f'"config":{json.dumps(entry.config_digest)},"ts":{entry.ts}'
        "}"
    )


def write_manifest(manifest: DatasetManifest, dest: str | Path) -> None:
    """Validate and write; identical manifests produce identical bytes."""
    validate_manifest(manifest)
    dest = Path(dest)
    lines = [HEADER]
    lines.extend(_fmt_prov(e) for e in manifest.provenance)
    lines.extend(_fmt_asset(manifest.assets[vid]) for vid in sorted(manifest.assets))
    lines.extend(_fmt_record(r) for r in manifest.records)
    try:
        dest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"cannot write manifest to {dest}: {exc}") from exc


def _parse_scenes(raw, vid: str, lineno: int) -> tuple[SceneSpan, ...]:
    try:
        return tuple(SceneSpan(int(a), int(b)) for a, b in raw)
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{vid}: bad scenes field ({exc})", line=lineno) from exc


def _parse_presence(raw, vid: str, lineno: int) -> tuple[tuple[int, bool], ...]:
    try:
        return tuple((int(i), bool(int(f))) for i, f in raw)
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{vid}: bad presence field ({exc})", line=lineno) from exc


def _parse_asset(obj: dict, lineno: int) -> VideoAsset:
    try:
        vid = obj["video_id"]
        asset = VideoAsset(
            video_id=vid,
            hashtag=obj["hashtag"],
            duration_s=float(obj["duration_s"]),
            frame_rate=float(obj["frame_rate"]),
            media_path=obj.get("media_path", ""),
            download_permitted=bool(obj["download_permitted"]),
            source_meta=dict(obj.get("meta", {})),
            scenes=_parse_scenes(obj.get("scenes", []), obj.get("video_id", "?"), lineno),
            presence=_parse_presence(obj.get("presence", []), obj.get("video_id", "?"), lineno),
        )
    except ManifestError:
        raise
    except KeyError as exc:
        raise ManifestError(f"asset line missing field {exc}", line=lineno) from exc
    except (TypeError, ValueError, ValidationError) as exc:
        raise ManifestError(f"bad asset line ({exc})", line=lineno) from exc
    return asset


def _parse_record(obj: dict, lineno: int) -> ClipRecord:
    try:
        reason = obj["reject_reason"]
        if reason not in _REASONS:
            raise ManifestError(f"unknown reject_reason {reason!r}", line=lineno)
        start = obj["clip_start_s"]
        end = obj["clip_end_s"]
        return ClipRecord(
            video_id=obj["video_id"],
            clip_start_s=None if start is None else float(start),
            clip_end_s=None if end is None else float(end),
            presence_ratio=float(obj["presence_ratio"]),
            accepted=bool(obj["accepted"]),
            reject_reason=RejectReason(reason),
        )
    except ManifestError:
        raise
    except KeyError as exc:
        raise ManifestError(f"record line missing field {exc}", line=lineno) from exc
    except (TypeError, ValueError, ValidationError) as exc:
        raise ManifestError(f"bad record line ({exc})", line=lineno) from exc


def read_manifest(src: str | Path) -> DatasetManifest:
    """Parse and validate; ``read(write(m)) == m`` for any valid manifest."""
    src = Path(src)
    try:
        fh = src.open("r", encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"cannot read manifest {src}: {exc}") from exc

    manifest = DatasetManifest(base_dir=src.parent)
    with fh:
        first = fh.readline().rstrip("\n")
        if first != HEADER:
            raise ManifestError(f"bad header {first!r}, expected {HEADER!r}", line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"not valid JSON ({exc.msg})", line=lineno) from exc
            if not isinstance(obj, dict) or "t" not in obj:
                raise ManifestError("line is not a tagged object", line=lineno)
            kind = obj["t"]
            if kind == "asset":
                asset = _parse_asset(obj, lineno)
                if asset.video_id in manifest.assets:
                    raise ManifestError(f"duplicate video_id {asset.video_id}", line=lineno)
                manifest.assets[asset.video_id] = asset
            elif kind == "rec":
                manifest.records.append(_parse_record(obj, lineno))
            elif kind == "prov":
                try:
                    manifest.provenance.append(
                        ProvenanceEntry(obj["stage"], obj["config"], int(obj["ts"]))
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ManifestError(f"bad provenance line ({exc})", line=lineno) from exc
            else:
                raise ManifestError(f"unknown line type {kind!r}", line=lineno)

    validate_manifest(manifest)
    return manifest


def merge_manifests(a: DatasetManifest, b: DatasetManifest) -> DatasetManifest:
    """Union of two manifests.

    On a ``video_id`` collision the records from the manifest with the later
    provenance timestamp win (ties favor ``b``). Assets for the same video
    must agree on ``duration_s``.
    """
    b_wins = b.latest_ts() >= a.latest_ts()
    older, newer = (a, b) if b_wins else (b, a)

    assets: dict[str, VideoAsset] = {}
    for source in (older, newer):
        for vid, asset in source.assets.items():
            existing = assets.get(vid)
            if existing is not None and existing.duration_s != asset.duration_s:
                raise ManifestError(
                    f"conflicting assets for {vid}: duration_s "
                    f"{existing.duration_s:.3f} vs {asset.duration_s:.3f}"
                )
            assets[vid] = asset

    newer_vids = {rec.video_id for rec in newer.records}
    merged = [rec for rec in older.records if rec.video_id not in newer_vids]
    merged.extend(newer.records)
    merged.sort(key=_record_sort_key)

    provenance = list(a.provenance)
    seen = set(provenance)
    for entry in b.provenance:
        if entry not in seen:
            provenance.append(entry)
            seen.add(entry)
    provenance.sort(key=lambda e: e.ts)
    # Sibling histories can collide on logical timestamps; renumber only then
    # so merge(m, empty) leaves m's chain untouched.
    if any(provenance[i].ts <= provenance[i - 1].ts for i in range(1, len(provenance))):
        provenance = [
            ProvenanceEntry(e.stage, e.config_digest, i) for i, e in enumerate(provenance)
        ]

    out = DatasetManifest(records=merged, assets=assets, provenance=provenance,
                          base_dir=a.base_dir or b.base_dir)
    validate_manifest(out)
    return out
