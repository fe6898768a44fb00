"""Stage orchestration: each stage reads a manifest file, transforms it, and
writes a new manifest with one appended provenance entry.

Stages share no in-memory state, so any stage can be rerun from its input
file; within a stage, videos are processed by a bounded worker pool and the
results are merged in video-id order, keeping outputs byte-identical
regardless of completion order.
"""

from __future__ import annotations

import dataclasses
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

from .clippolicy import decide_from_annotations
from .detector import DetectorSession
from .errors import MediaError
from .features import frame_features
from .humanfilter import frame_has_person
from .ingest import SourceClient, ingest_hashtags
from .manifest import read_manifest, write_manifest
from .model import DatasetManifest, PipelineConfig, VideoAsset, q3
from .rawvideo import decode_with_command, iter_frame_blocks, read_frames, read_header
from .sampler import make_plan, write_frame_images
from .scenes import compute_content_scores, detect_cuts, scenes_from_cuts
from .stats import duration_histogram, emit_report, summarize_hashtags

log = logging.getLogger(__name__)


def stage_ingest(config: PipelineConfig, tags: Sequence[str], client: SourceClient,
                 out_path: str | Path, workers: int = 4) -> DatasetManifest:
    """List and download every hashtag's videos into the manifest's directory."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    media_dir = out_path.parent / "media"
    assets = ingest_hashtags(tags, client, config.per_hashtag_cap,
                             media_dir, out_path.parent, workers=workers)
    manifest = DatasetManifest(
        records=[],
        assets={a.video_id: _quantized(a) for a in assets},
        provenance=[],
        base_dir=out_path.parent,
    ).with_stage("ingest", config.digest())
    write_manifest(manifest, out_path)
    return manifest


def _quantized(asset: VideoAsset) -> VideoAsset:
    return dataclasses.replace(asset, duration_s=q3(asset.duration_s),
                               frame_rate=q3(asset.frame_rate))


def _resolve_media(manifest: DatasetManifest, asset: VideoAsset,
                   config: PipelineConfig, scratch_dir: Path) -> Path:
    media = manifest.resolve_media_path(asset)
    if media is None:
        raise MediaError(f"{asset.video_id}: asset has no media")
    try:
        read_header(media)
        return media
    except MediaError:
        if not config.decoder_cmd:
            raise
    scratch_dir.mkdir(parents=True, exist_ok=True)
    return decode_with_command(config.decoder_cmd, media, scratch_dir / f"{asset.video_id}.crv")


def _scan_asset(manifest: DatasetManifest, asset: VideoAsset,
                config: PipelineConfig, scratch_dir: Path) -> VideoAsset:
    media = _resolve_media(manifest, asset, config, scratch_dir)
    features = []
    total = 0
    for start, block in iter_frame_blocks(media):
        features.extend(frame_features(block, start_index=start))
        total = start + block.shape[0]
    if total == 0:
        raise MediaError(f"{asset.video_id}: media holds no frames")
    if total == 1:
        cuts = []
    else:
        scores = compute_content_scores(features)
        cuts = detect_cuts(scores, config.cut_threshold, config.min_scene_len_frames)
    spans = scenes_from_cuts(total, cuts)
    return dataclasses.replace(asset, scenes=tuple(spans))


def _map_permitted(manifest: DatasetManifest, worker: Callable[[VideoAsset], VideoAsset],
                   workers: int) -> DatasetManifest:
    """Apply a per-asset transform to permitted assets, in parallel."""
    permitted = [a for a in manifest.assets.values() if a.download_permitted]
    updated: dict[str, VideoAsset] = dict(manifest.assets)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for asset in pool.map(worker, sorted(permitted, key=lambda a: a.video_id)):
            updated[asset.video_id] = asset
    return dataclasses.replace(manifest, assets=updated)


def stage_scan(config: PipelineConfig, in_path: str | Path, out_path: str | Path,
               workers: int = 4) -> DatasetManifest:
    """Shot-boundary detection: annotate every permitted asset with its scenes."""
    manifest = read_manifest(in_path)
    scratch = Path(out_path).parent / "decoded"
    scanned = _map_permitted(
        manifest, lambda a: _scan_asset(manifest, a, config, scratch), workers
    )
    out = scanned.with_stage("scan", config.digest())
    write_manifest(out, out_path)
    return out


def stage_filter(config: PipelineConfig, in_path: str | Path, out_path: str | Path,
                 session_factory: Callable[[], DetectorSession],
                 workers: int = 4) -> DatasetManifest:
    """Sample frames, run the detector, and annotate per-frame person flags."""
    manifest = read_manifest(in_path)
    frames_dir = Path(out_path).parent / "frames"
    scratch = Path(out_path).parent / "decoded"

    local = threading.local()
    sessions: list[DetectorSession] = []
    sessions_lock = threading.Lock()

    def session() -> DetectorSession:
        if not hasattr(local, "session"):
            local.session = session_factory()
            with sessions_lock:
                sessions.append(local.session)
        return local.session

    def work(asset: VideoAsset) -> VideoAsset:
        media = _resolve_media(manifest, asset, config, scratch)
        plan, exact = make_plan(asset, media, config.sample_count)
        frames = read_frames(media, indices=list(plan.indices))
        paths = write_frame_images(frames, plan, frames_dir)
        detections = session().detect(paths)
        presence = tuple(
            (d.frame_index, frame_has_person(d, config.min_det_score)) for d in detections
        )
        meta = dict(asset.source_meta)
        if not exact:
            meta["frame_count_estimated"] = "1"
        return dataclasses.replace(asset, presence=presence, source_meta=meta)

    try:
        filtered = _map_permitted(manifest, work, workers)
    finally:
        for s in sessions:
            s.close()
    out = filtered.with_stage("filter", config.digest())
    write_manifest(out, out_path)
    return out


def stage_trim(config: PipelineConfig, in_path: str | Path,
               out_path: str | Path) -> DatasetManifest:
    """Apply the duration policy; emits exactly one record per asset."""
    manifest = read_manifest(in_path)
    records = [
        decide_from_annotations(manifest.assets[vid], config)
        for vid in sorted(manifest.assets)
    ]
    out = dataclasses.replace(manifest, records=records).with_stage("trim", config.digest())
    write_manifest(out, out_path)
    return out


def stage_stats(in_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Write the stats report for a manifest (zero totals for empty corpora)."""
    manifest = read_manifest(in_path)
    histograms = []
    summary = None
    if manifest.accepted_records():
        summary = summarize_hashtags(manifest)
        histograms.append(duration_histogram(manifest, "post_trim"))
        if all(manifest.assets[r.video_id].scenes for r in manifest.accepted_records()):
            histograms.append(duration_histogram(manifest, "pre_trim"))
    return emit_report(out_dir, summary, histograms)


def run_all(config: PipelineConfig, tags: Sequence[str], client: SourceClient,
            out_dir: str | Path, session_factory: Callable[[], DetectorSession],
            workers: int = 4) -> Path:
    """ingest -> scan -> filter -> trim -> stats; returns the final manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    m_ingest = out_dir / "01_ingest.manifest"
    m_scan = out_dir / "02_scan.manifest"
    m_filter = out_dir / "03_filter.manifest"
    m_trim = out_dir / "final.manifest"

    stage_ingest(config, tags, client, m_ingest, workers=workers)
    stage_scan(config, m_ingest, m_scan, workers=workers)
    stage_filter(config, m_scan, m_filter, session_factory, workers=workers)
    stage_trim(config, m_filter, m_trim)
    stage_stats(m_trim, out_dir / "reports")
    return m_trim
