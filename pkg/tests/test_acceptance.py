"""Acceptance gate: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one printed
PASS line per criterion. All criteria run fully offline with the stub
detector.
"""

import hashlib
import random
import time

import pytest

from clipforge.cli import main
from clipforge.clippolicy import apply_duration_policy
from clipforge.detector import StubDetectorSession, load_stub_spec
from clipforge.experiments import ExperimentPlan, ScalingPoint, analyze_scaling, sample_subsets, write_subsets
from clipforge.features import frame_features
from clipforge.hashtags import Category, HashtagSpec, consolidate, filter_by_views
from clipforge.humanfilter import qualifies, summarize_presence
from clipforge.manifest import read_manifest
from clipforge.mocksource import MockSource
from clipforge.model import PipelineConfig, SceneSpan
from clipforge.pipeline import run_all
from clipforge.sampler import plan_indices
from clipforge.scenes import compute_content_scores, detect_cuts
from clipforge.stats import duration_histogram, summarize_hashtags

from conftest import (
    CUT_PALETTE,
    FIXTURE_VIDEOS,
    build_e2e_fixture,
    exhaustive_best_window,
    segmented_video,
)
from test_humanfilter import brute_force_person_frames, random_detection_table


def report(criterion: str, detail: str):
    print(f"PASS {criterion}: {detail}")


def test_criterion_01_shot_detection_oracle():
    """20 synthetic videos with known hard cuts; exact recovery in < 10s."""
    rng = random.Random(1)
    config = PipelineConfig()
    started = time.perf_counter()
    checked = 0
    for _ in range(20):
        n_segments = rng.randint(1, 6)
        lengths = [rng.randint(16, 60) for _ in range(n_segments)]
        while sum(lengths) > 300:
            lengths.pop()
        segments = [(n, CUT_PALETTE[i % len(CUT_PALETTE)])
                    for i, n in enumerate(lengths)]
        frames, truth = segmented_video(segments)
        feats = frame_features(frames)
        scores = compute_content_scores(feats) if len(feats) > 1 else []
        cuts = detect_cuts(scores, config.cut_threshold, config.min_scene_len_frames)
        assert len(cuts) == len(truth)
        assert all(abs(got - want) <= 1 for got, want in zip(cuts, truth))
        checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"shot detection oracle took {elapsed:.1f}s"
    report("criterion-01", f"{checked} synthetic videos, exact cuts, {elapsed:.2f}s")


def test_criterion_02_sampling_formula_property():
    """plan_indices invariants for every N in [1, 10000] at K=10, plus spot values."""
    k = 10
    for n in range(1, 10_001):
        indices = plan_indices(n, k)
        assert len(indices) == min(k, n)
        assert all(b > a for a, b in zip(indices, indices[1:]))
        assert indices[-1] < n
        if n >= k:
            gaps = {b - a for a, b in zip(indices, indices[1:])}
            assert max(gaps) - min(gaps) <= 1
    assert plan_indices(100, 10) == (0, 10, 20, 30, 40, 50, 60, 70, 80, 90)
    assert plan_indices(95, 10) == (0, 9, 19, 28, 38, 47, 57, 66, 76, 85)
    report("criterion-02", "all N in [1, 10000] at K=10 plus hand-derived spot lists")


def test_criterion_03_human_filter_brute_force():
    """1,000 randomized detection tables agree with the independent recount."""
    rng = random.Random(20260809)
    for case in range(1000):
        table = random_detection_table(rng)
        min_score = rng.choice([0.0, 0.25, 0.5, 0.9])
        theta = rng.choice([0.1, 0.5, 0.7, 1.0])
        summary = summarize_presence(table, min_score)
        expected_persons = brute_force_person_frames(table, min_score)
        assert summary.person_frames == expected_persons
        assert summary.sampled == len(table)
        ok, _ = qualifies(summary, theta)
        assert ok == (expected_persons / len(table) >= theta)
    report("criterion-03", "1000/1000 randomized tables match the recount oracle")


def test_criterion_04_window_selection_optimality():
    """>= 500 random presence vectors (<= 600 frames): chosen window is optimal."""
    rng = random.Random(42)
    cases = 0
    for _ in range(500):
        fps = rng.choice([1.0, 5.0, 10.0, 24.0])
        min_frames = int(10.5 * fps) + 1
        total = rng.randint(min_frames, max(min_frames, 600))
        start = rng.randint(0, 20)
        scene = SceneSpan(start, start + total)
        density = rng.choice([0.05, 0.3, 0.5, 0.9])
        presence = [False] * start + [rng.random() < density for _ in range(total)]
        decision = apply_duration_policy(scene, fps, presence)
        best_t, best_count = exhaustive_best_window(scene, fps, presence)
        assert decision.clip_start_s == pytest.approx(best_t), "tie must go to earliest"
        cases += 1
    report("criterion-04", f"{cases}/500 windows match exhaustive search incl. ties")


def test_criterion_05_duration_table_consistency(corpus_profile_manifest):
    """Histogram reproduces the published bucket counts and shares (±0.1%)."""
    hist = duration_histogram(corpus_profile_manifest, "post_trim")
    assert hist.buckets == {"3.5-5": 30_103, "5-10": 81_356, "10+": 172_123}
    shares = hist.shares()
    assert shares["3.5-5"] == pytest.approx(0.106, abs=0.001)
    assert shares["5-10"] == pytest.approx(0.287, abs=0.001)
    assert shares["10+"] == pytest.approx(0.607, abs=0.001)
    report("criterion-05", "30103/81356/172123 exact; shares 10.6/28.7/60.7 ±0.1%")


def test_criterion_06_hashtag_count_consistency(corpus_profile_manifest):
    """Per-hashtag summary reproduces the published corpus profile."""
    summary = summarize_hashtags(corpus_profile_manifest)
    assert summary.mean == pytest.approx(735, abs=1)
    assert summary.max_tag == ("sax", 938)
    assert summary.min_tag == ("mopping", 325)
    assert summary.bucket_shares["600-800"] == pytest.approx(0.534, abs=0.002)
    report("criterion-06", "mean 734.7 (±1 of 735), max sax=938, min mopping=325, "
                           f"600-800 share {summary.bucket_shares['600-800']:.4f}")


def test_criterion_07_hashtag_rules():
    """View floor keeps both published example tags; consolidation keeps the
    highest-viewed tag of the cutting group only."""
    table = [
        HashtagSpec("piano", 44_400_000_000, Category.KINETICS, "piano"),
        HashtagSpec("playingpiano", 29_400_000, Category.KINETICS, "piano"),
    ]
    kept = filter_by_views(table, 5_000_000)
    assert [s.tag for s in kept] == ["piano", "playingpiano"]

    cutting = [
        HashtagSpec("cuttingcakes", 9_000_000, Category.KINETICS, "cuttingcakes"),
        HashtagSpec("cutfruit", 2_000_000, Category.KINETICS, "cutfruit"),
        HashtagSpec("applecutting", 1_000_000, Category.KINETICS, "applecutting"),
    ]
    mapping = {"cuttingcakes": "cutting", "cutfruit": "cutting", "applecutting": "cutting"}
    consolidated = consolidate(cutting, mapping)
    assert [s.tag for s in consolidated] == ["cuttingcakes"]
    report("criterion-07", "5M floor keeps piano+playingpiano; group keeps cuttingcakes")


def test_criterion_08_experiment_protocol(tmp_path):
    """Default plan: 18 subsets, bit-identical across reruns; knee detection."""
    from conftest import accepted_record, make_asset
    from clipforge.model import DatasetManifest, ProvenanceEntry

    assets, records = {}, []
    for i in range(8000):
        vid = f"v{i:06d}"
        assets[vid] = make_asset(vid, f"tag{i % 40:03d}")
        records.append(accepted_record(vid, 0.0, 10.0))
    manifest = DatasetManifest(records=records, assets=assets,
                               provenance=[ProvenanceEntry("trim", "f" * 12, 0)])

    plan = ExperimentPlan(master_seed=123)
    paths_a = write_subsets(sample_subsets(manifest, plan), tmp_path / "a")
    paths_b = write_subsets(sample_subsets(manifest, plan), tmp_path / "b")
    assert len(paths_a) == 18
    for pa, pb in zip(paths_a, paths_b):
        assert hashlib.sha256(pa.read_bytes()).digest() == \
               hashlib.sha256(pb.read_bytes()).digest()
        size = int(pa.stem.split("_")[1])
        assert len(read_manifest(pa).records) == size

    concave = []
    linear = []
    for i, size in enumerate(plan.sizes):
        for run in range(3):
            concave.append(ScalingPoint(size, run, [0.70, 0.80, 0.86, 0.87, 0.875, 0.878][i],
                                        1.0))
            linear.append(ScalingPoint(size, run, 0.5 + 0.05 * i, 1.0))
    concave_analysis = analyze_scaling(concave)
    assert concave_analysis.diminishing and concave_analysis.knee_size == 3000
    linear_analysis = analyze_scaling(linear)
    assert not linear_analysis.diminishing
    report("criterion-08", "18 bit-identical subsets; knee 3000 on concave, none on linear")


def test_criterion_09_ethics_gate(tmp_path):
    """Mixed-permission end-to-end run issues zero media requests for
    non-permitted assets (mock request log assertion)."""
    fixture, stub_spec = build_e2e_fixture(tmp_path)
    source = MockSource(fixture)
    spec = load_stub_spec(stub_spec)
    run_all(PipelineConfig(), ["dance", "fitness"], source, tmp_path / "out",
            lambda: StubDetectorSession(spec), workers=2)
    permitted = {vid for vid, _, perm, *_ in FIXTURE_VIDEOS if perm}
    non_permitted = {vid for vid, _, perm, *_ in FIXTURE_VIDEOS if not perm}
    fetched = set(source.media_requests())
    assert fetched & non_permitted == set()
    assert fetched == permitted
    final = read_manifest(tmp_path / "out" / "final.manifest")
    skips = [r for r in final.records if r.reject_reason.value == "no_permission"]
    assert {r.video_id for r in skips} == non_permitted
    report("criterion-09", f"0 media requests for {sorted(non_permitted)}")


BACKEND_DIR = __import__("pathlib").Path(__file__).parent.parent / "backend"
BACKEND_MAIN = BACKEND_DIR / "dist" / "src" / "main.js"
BACKEND_READY = BACKEND_MAIN.exists() and (BACKEND_DIR / "node_modules").is_dir()


@pytest.mark.skipif(not BACKEND_READY, reason="detector backend not built")
def test_criterion_11_backend_conformance(tmp_path):
    """[secondary] 50 requests through the real backend: id-matched responses;
    blank fixture yields zero boxes; person fixture yields a confident person."""
    import shutil

    from clipforge.detector import open_session

    frames = tmp_path / "frames" / "vx"
    frames.mkdir(parents=True)
    fixtures = BACKEND_DIR / "fixtures"
    paths = []
    for i in range(50):
        name = ("blank.png", "person.png")[i % 2]
        dest = frames / f"{i}.png"
        shutil.copyfile(fixtures / name, dest)
        paths.append(dest)

    cmd = ["node", str(BACKEND_MAIN), "--model", str(fixtures / "model")]
    with open_session(cmd, timeout_s=60) as session:
        assert session.model_name == "edge-energy-tiny"
        results = session.detect(paths)
    assert len(results) == 50
    assert [r.frame_index for r in results] == list(range(50))
    for i, frame in enumerate(results):
        if i % 2 == 0:
            assert frame.boxes == ()
        else:
            best = max(frame.boxes, key=lambda b: b.score)
            assert best.label == "person"
            assert best.score >= 0.5
    report("criterion-11", "50/50 id-matched; blank=0 boxes; person>=0.5 via real backend")


def test_criterion_10_pipeline_determinism(tmp_path):
    """run-all twice on the 12-video fixture: byte-identical outputs, < 60s."""
    started = time.perf_counter()
    digests = []
    for name in ("one", "two"):
        root = tmp_path / name
        fixture, stub_spec = build_e2e_fixture(root)
        tags = root / "tags.csv"
        tags.write_text("tag,views,category\ndance,9000000000,dance\n"
                        "fitness,7000000000,fitness\n")
        out_dir = root / "out"
        code = main([
            "run-all",
            "--hashtags", str(tags),
            "--fixture", str(fixture),
            "--out-dir", str(out_dir),
            "--stub-detector", str(stub_spec),
            "--workers", "4",
        ])
        assert code == 0
        tree = {}
        for path in sorted(out_dir.rglob("*")):
            if path.is_file():
                tree[str(path.relative_to(out_dir))] = hashlib.sha256(
                    path.read_bytes()).hexdigest()
        digests.append(tree)
    elapsed = time.perf_counter() - started
    assert digests[0] == digests[1]
    assert elapsed < 60.0, f"two runs took {elapsed:.1f}s"
    final = read_manifest(tmp_path / "one" / "out" / "final.manifest")
    assert sum(1 for r in final.records if r.accepted) == 7
    report("criterion-10", f"byte-identical outputs across reruns, {elapsed:.1f}s for two runs")
