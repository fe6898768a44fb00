"""Shared builders for synthetic videos, corpus fixtures, and the mock source."""

from __future__ import annotations

from pathlib import Path

import pytest

from clipforge.demo import (  # noqa: F401  (re-exported for test modules)
    CUT_PALETTE,
    DEMO_VIDEOS as FIXTURE_VIDEOS,
    build_demo_fixture,
    segmented_video,
    solid_frames,
)
from clipforge.model import (
    ClipRecord,
    DatasetManifest,
    ProvenanceEntry,
    RejectReason,
    VideoAsset,
    q3,
)

TESTS_DIR = Path(__file__).parent
FAKE_BACKEND = TESTS_DIR / "fake_backend.py"


def make_asset(video_id: str, hashtag: str = "dance", duration_s: float = 10.0,
               frame_rate: float = 30.0, permitted: bool = True, **kwargs) -> VideoAsset:
    return VideoAsset(
        video_id=video_id,
        hashtag=hashtag,
        duration_s=q3(duration_s),
        frame_rate=q3(frame_rate),
        download_permitted=permitted,
        **kwargs,
    )


def accepted_record(video_id: str, start: float = 0.0, length: float = 10.0,
                    ratio: float = 1.0) -> ClipRecord:
    return ClipRecord(
        video_id=video_id,
        clip_start_s=q3(start),
        clip_end_s=q3(start + length),
        presence_ratio=ratio,
        accepted=True,
        reject_reason=RejectReason.NONE,
    )


def rejected_record(video_id: str, reason: RejectReason, ratio: float = 0.0) -> ClipRecord:
    return ClipRecord(
        video_id=video_id,
        clip_start_s=None,
        clip_end_s=None,
        presence_ratio=ratio,
        accepted=False,
        reject_reason=reason,
    )


def small_manifest() -> DatasetManifest:
    assets = {
        "v001": make_asset("v001", "piano", 12.0),
        "v002": make_asset("v002", "salsa", 8.0),
        "v003": make_asset("v003", "piano", 20.0, permitted=False),
    }
    records = [
        accepted_record("v001", 1.0, 10.0, 0.9),
        accepted_record("v002", 0.0, 8.0, 0.7),
        rejected_record("v003", RejectReason.NO_PERMISSION),
    ]
    return DatasetManifest(records=records, assets=assets,
                           provenance=[ProvenanceEntry("ingest", "abc123def456", 0)])


def corpus_profile_counts() -> dict[str, int]:
    """Per-hashtag video counts matching the published dataset profile:
    386 tags, 283,582 total, max 938 at 'sax', min 325 at 'mopping',
    206 tags (53.37%) in the 600-800 range."""
    counts = {"sax": 938, "mopping": 325}
    values = (
        [650] * 103 + [750] * 103      # 600-800 bucket: 206 tags
        + [450] * 18 + [550] * 18      # 400-600
        + [820] * 70 + [880] * 70      # 800+
        + [559, 560]                   # 400-600
    )
    for i, value in enumerate(values):
        counts[f"tag{i:03d}"] = value
    assert len(counts) == 386
    assert sum(counts.values()) == 283_582
    return counts


def build_corpus_profile_manifest() -> DatasetManifest:
    """One accepted record per video; tag counts follow corpus_profile_counts
    and clip durations follow the published duration table: 30,103 records
    at 4.0s, 81,356 at 7.0s, 172,123 capped at exactly 10.0s."""
    counts = corpus_profile_counts()
    durations = [(30_103, 4.0), (81_356, 7.0), (172_123, 10.0)]
    duration_iter = iter(
        length for bucket_count, length in durations for _ in range(bucket_count)
    )
    records = []
    assets = {}
    serial = 0
    for tag in sorted(counts):
        for _ in range(counts[tag]):
            vid = f"v{serial:06d}"
            serial += 1
            length = next(duration_iter)
            assets[vid] = make_asset(vid, tag, duration_s=30.0)
            records.append(accepted_record(vid, 0.0, length))
    return DatasetManifest(records=records, assets=assets,
                           provenance=[ProvenanceEntry("synthetic", "0" * 12, 0)])


@pytest.fixture(scope="session")
def corpus_profile_manifest() -> DatasetManifest:
    return build_corpus_profile_manifest()


# --- twelve-video end-to-end fixture -------------------------------------

# Hand-decided outcome per demo video (reason None = accepted).
FIXTURE_EXPECTED = {
    "v01": None,
    "v02": None,
    "v03": RejectReason.TOO_SHORT,
    "v04": RejectReason.NO_PERMISSION,
    "v05": RejectReason.INSUFFICIENT_HUMANS,
    "v06": None,
    "v07": None,
    "v08": RejectReason.NO_PERMISSION,
    "v09": None,
    "v10": RejectReason.INSUFFICIENT_HUMANS,
    "v11": None,
    "v12": None,
}


def build_e2e_fixture(root: Path, k: int = 10) -> tuple[Path, Path]:
    """12-video mock-source fixture; returns (fixture_dir, stub_spec_path)."""
    fixture, stub_path, _ = build_demo_fixture(root, k=k)
    return fixture, stub_path


@pytest.fixture()
def e2e_fixture(tmp_path):
    return build_e2e_fixture(tmp_path)


def exhaustive_best_window(scene, fps: float, presence, max_clip_s: float = 10.0):
    """Independent best-window search over the 0.5s candidate grid, in exact
    arithmetic: frame i is in window [t, t+max] iff t <= i/fps <= t+max,
    which (multiplied by fps) becomes ceil(lo) <= i <= floor(hi) with
    Fraction bounds, free of float rounding. Returns (start_seconds,
    person_count); earliest start wins ties."""
    import math
    from fractions import Fraction

    fps_f = Fraction(fps)
    best = None
    k = 0
    while True:
        lo = scene.start_frame + k * fps_f * Fraction(1, 2)
        hi = lo + Fraction(max_clip_s) * fps_f
        if hi > scene.end_frame:
            break
        first = max(scene.start_frame, math.ceil(lo))
        last = min(scene.end_frame - 1, math.floor(hi))
        count = sum(1 for idx in range(first, last + 1) if presence[idx])
        if best is None or count > best[1]:
            best = (scene.start_frame / fps + k * 0.5, count)
        k += 1
    return best
