"""Self-contained demo fixture: 12 synthetic videos with scripted outcomes.

Builds a mock-source fixture directory (asset records + raw-video media),
a stub detector spec, and a hashtag CSV, so the full pipeline can run
offline end to end. Videos cover every gate: hard cuts, a too-short scene,
denied download permission, sparse and boundary human presence, and scenes
needing the 10-second trim.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import q3
from .rawvideo import crv_bytes
from .sampler import plan_indices

# Distinct colors far apart in hue/sat/value so hard cuts score well above
# the default threshold.
CUT_PALETTE = [
    (200, 30, 30), (30, 200, 30), (30, 30, 200), (220, 220, 40),
    (40, 220, 220), (220, 40, 220), (240, 240, 240), (20, 20, 20),
]

# (video_id, hashtag, permitted, scene frame counts, fps, person slots mode)
DEMO_VIDEOS = [
    ("v01", "dance", True, [150, 150], 10.0, "all"),
    ("v02", "dance", True, [600], 30.0, "middle"),
    ("v03", "dance", True, [20], 10.0, "all"),
    ("v04", "dance", False, [100], 10.0, "none"),
    ("v05", "dance", True, [100], 10.0, "three"),
    ("v06", "dance", True, [42], 10.0, "all"),
    ("v07", "fitness", True, [80], 10.0, "half"),
    ("v08", "fitness", False, [100], 10.0, "none"),
    ("v09", "fitness", True, [100, 120, 80], 10.0, "all"),
    ("v10", "fitness", True, [100], 10.0, "none"),
    ("v11", "fitness", True, [35], 10.0, "all"),
    ("v12", "fitness", True, [100], 10.0, "all"),
]

DEMO_TAGS_CSV = (
    "tag,views,category\n"
    "dance,9000000000,dance\n"
    "fitness,7000000000,fitness\n"
)


def solid_frames(n: int, rgb: tuple[int, int, int], width: int = 64,
                 height: int = 48) -> np.ndarray:
    frames = np.empty((n, 3, height, width), dtype=np.uint8)
    for c in range(3):
        frames[:, c] = rgb[c]
    return frames


def segmented_video(segments: list[tuple[int, tuple[int, int, int]]],
                    width: int = 64, height: int = 48) -> tuple[np.ndarray, list[int]]:
    """Concatenate solid-color segments; returns (frames, ground-truth cuts)."""
    blocks = [solid_frames(n, rgb, width, height) for n, rgb in segments]
    cuts = []
    acc = 0
    for n, _ in segments[:-1]:
        acc += n
        cuts.append(acc)
    return np.concatenate(blocks), cuts


def person_slots(mode: str, indices: list[int]) -> list[int]:
    if mode == "all":
        return indices
    if mode == "none":
        return []
    if mode == "three":
        return indices[:3]
    if mode == "half":
        return indices[: len(indices) // 2]
    if mode == "middle":
        k = len(indices)
        return indices[k // 2 - 3 : k // 2 + 3]
    raise ValueError(f"unknown person slot mode {mode!r}")


def build_demo_fixture(root: str | Path, k: int = 10) -> tuple[Path, Path, Path]:
    """Write fixture dir, stub detector spec, and hashtag CSV under ``root``.

    Returns (fixture_dir, stub_spec_path, tags_csv_path).
    """
    root = Path(root)
    fixture = root / "fixture"
    media = fixture / "media"
    media.mkdir(parents=True, exist_ok=True)

    asset_lines = []
    stub_spec: dict[str, list[int]] = {}
    for vid, tag, permitted, scene_frames, fps, mode in DEMO_VIDEOS:
        total = sum(scene_frames)
        segments = [
            (n, CUT_PALETTE[i % len(CUT_PALETTE)]) for i, n in enumerate(scene_frames)
        ]
        frames, _ = segmented_video(segments)
        if permitted:
            (media / f"{vid}.crv").write_bytes(crv_bytes(frames, fps))
        asset_lines.append(json.dumps({
            "video_id": vid,
            "hashtag": tag,
            "duration_s": q3(total / fps),
            "frame_rate": fps,
            "download_permitted": permitted,
            "meta": {"title": f"clip {vid}", "views": "12345"},
        }))
        stub_spec[vid] = person_slots(mode, list(plan_indices(total, k)))

    (fixture / "assets.jsonl").write_text("\n".join(asset_lines) + "\n")
    stub_path = root / "stub_spec.json"
    stub_path.write_text(json.dumps(stub_spec, indent=1))
    tags_path = root / "tags.csv"
    tags_path.write_text(DEMO_TAGS_CSV)
    return fixture, stub_path, tags_path
