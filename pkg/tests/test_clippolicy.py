"""Duration policy: band behavior, window optimality against exhaustive search."""

import random
from fractions import Fraction

import pytest

from clipforge.clippolicy import (
    WINDOW_STEP_S,
    apply_duration_policy,
    decide_from_annotations,
    decide_video,
)
from clipforge.errors import ValidationError
from clipforge.humanfilter import HumanPresenceSummary
from clipforge.model import PipelineConfig, RejectReason, SceneSpan

from conftest import exhaustive_best_window, make_asset


class TestDurationBands:
    def test_short_scene_rejected(self):
        scene = SceneSpan(0, 20)  # 2.0s at 10fps
        decision = apply_duration_policy(scene, 10.0, [True] * 20)
        assert not decision.accepted
        assert decision.reject_reason is RejectReason.TOO_SHORT

    def test_pass_through_band_unchanged(self):
        scene = SceneSpan(0, 42)  # 4.2s at 10fps
        decision = apply_duration_policy(scene, 10.0, [True] * 42)
        assert decision.accepted
        assert decision.clip_start_s == pytest.approx(0.0)
        assert decision.clip_end_s == pytest.approx(4.2)

    def test_band_boundaries_inclusive(self):
        at_min = apply_duration_policy(SceneSpan(0, 35), 10.0, [True] * 35)
        assert at_min.accepted and at_min.clip_end_s == pytest.approx(3.5)
        at_max = apply_duration_policy(SceneSpan(0, 100), 10.0, [True] * 100)
        assert at_max.accepted and at_max.clip_end_s == pytest.approx(10.0)

    def test_long_scene_picks_person_dense_window(self):
        # 25s scene at 1fps, persons only in seconds 12-22
        presence = [12 <= i <= 22 for i in range(25)]
        decision = apply_duration_policy(SceneSpan(0, 25), 1.0, presence)
        assert decision.accepted
        assert decision.clip_start_s == pytest.approx(12.0)
        assert decision.clip_end_s == pytest.approx(22.0)

    def test_empty_presence_errors(self):
        with pytest.raises(ValidationError):
            apply_duration_policy(SceneSpan(0, 50), 10.0, [])

    def test_clip_contained_in_scene(self):
        scene = SceneSpan(100, 400)  # 10s..40s at 10fps
        decision = apply_duration_policy(scene, 10.0, [True] * 400)
        assert decision.clip_start_s >= scene.start_frame / 10.0 - 1e-9
        assert decision.clip_end_s <= scene.end_frame / 10.0 + 1e-9


class TestWindowOptimality:
    def test_matches_exhaustive_on_random_vectors(self):
        rng = random.Random(42)
        for _ in range(500):
            fps = rng.choice([1.0, 5.0, 10.0, 24.0])
            max_frames = 600
            min_frames = int(10.5 * fps) + 1
            total = rng.randint(min_frames, max(min_frames, max_frames))
            start = rng.randint(0, 20)
            scene = SceneSpan(start, start + total)
            presence = [False] * (start + total)
            for i in range(start, start + total):
                presence[i] = rng.random() < rng.choice([0.1, 0.5, 0.9])
            decision = apply_duration_policy(scene, fps, presence)
            assert decision.accepted
            best_t, best_count = exhaustive_best_window(scene, fps, presence)
            # earliest-start tie-break: the policy must return the oracle's
            # first maximal window exactly
            assert decision.clip_start_s == pytest.approx(best_t)
            k = round((decision.clip_start_s - scene.start_frame / fps) / WINDOW_STEP_S)
            lo = scene.start_frame + k * Fraction(fps) / 2
            hi = lo + Fraction(10.0) * Fraction(fps)
            got = sum(
                1 for i in range(scene.start_frame, scene.end_frame)
                if lo <= i <= hi and presence[i]
            )
            assert got == best_count

    def test_tie_breaks_earliest(self):
        # uniform presence: every window ties, earliest must win
        scene = SceneSpan(0, 300)
        decision = apply_duration_policy(scene, 10.0, [True] * 300)
        assert decision.clip_start_s == pytest.approx(0.0)


class TestDecideVideo:
    def config(self):
        return PipelineConfig()

    def test_permitted_rich_video_accepted_ten_seconds(self):
        asset = make_asset("v1", duration_s=30.0, frame_rate=10.0)
        spans = [SceneSpan(0, 300)]
        summary = HumanPresenceSummary("v1", 10, 10)
        record = decide_video(asset, spans, summary, [True] * 300, self.config())
        assert record.accepted
        assert record.clip_length_s == pytest.approx(10.0)
        assert record.presence_ratio == pytest.approx(1.0)

    def test_human_filter_gate_precedes_duration(self):
        # scene is also too short, but the presence gate fires first
        asset = make_asset("v1", duration_s=2.0, frame_rate=10.0)
        spans = [SceneSpan(0, 20)]
        summary = HumanPresenceSummary("v1", 10, 1)
        record = decide_video(asset, spans, summary, [False] * 20, self.config())
        assert not record.accepted
        assert record.reject_reason is RejectReason.INSUFFICIENT_HUMANS
        assert record.clip_start_s is None and record.clip_end_s is None

    def test_permission_gate_first(self):
        asset = make_asset("v1", permitted=False)
        record = decide_video(asset, [], None, None, self.config())
        assert not record.accepted
        assert record.reject_reason is RejectReason.NO_PERMISSION

    def test_empty_spans_error_for_permitted(self):
        asset = make_asset("v1")
        with pytest.raises(ValidationError):
            decide_video(asset, [], HumanPresenceSummary("v1", 10, 10), [True], self.config())


class TestDecideFromAnnotations:
    def test_composes_annotations(self):
        asset = make_asset(
            "v1", duration_s=30.0, frame_rate=10.0,
            scenes=(SceneSpan(0, 100), SceneSpan(100, 300)),
            presence=tuple((i * 30, True) for i in range(10)),
        )
        record = decide_from_annotations(asset, PipelineConfig())
        assert record.accepted
        # longest scene is [100, 300): clip must sit inside it
        assert record.clip_start_s >= 10.0 - 1e-9
        assert record.clip_end_s <= 30.0 + 1e-9

    def test_missing_scan_annotation_errors(self):
        asset = make_asset("v1")
        with pytest.raises(ValidationError, match="scene"):
            decide_from_annotations(asset, PipelineConfig())
