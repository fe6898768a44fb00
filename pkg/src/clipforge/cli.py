"""Command-line front end wiring the stages into a streaming pipeline.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 detector-backend
failure. Stage errors name the failing video_id where one is known.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .detector import StubDetectorSession, SubprocessDetectorSession, load_stub_spec
from .errors import (
    ClipforgeError,
    DetectorError,
    FileAccessError,
    ManifestError,
    MediaError,
    SourceError,
    ValidationError,
)
from .experiments import (
    ExperimentPlan,
    analyze_scaling,
    read_results_csv,
    sample_stratified,
    sample_subsets,
    write_scaling_file,
    write_subsets,
)
from .hashtags import consolidate, filter_by_views, lint_gerunds, read_hashtag_csv, read_synonym_csv, write_hashtag_csv
from .ingest import HttpSourceClient, RateLimiter
from .manifest import read_manifest, write_manifest
from .mocksource import MockSource
from .model import PipelineConfig
from . import pipeline


def _config(args) -> PipelineConfig:
    if args.config:
        return PipelineConfig.load(args.config)
    return PipelineConfig()


def _client(args, config: PipelineConfig):
    if getattr(args, "fixture", None):
        return MockSource(args.fixture)
    if getattr(args, "source", None):
        limiter = RateLimiter(config.rate_capacity, config.rate_refill_per_s)
        return HttpSourceClient(args.source, limiter=limiter)
    raise ValidationError("need --fixture DIR or --source URL")


def _session_factory(args):
    if getattr(args, "stub_detector", None):
        spec = load_stub_spec(args.stub_detector)
        return lambda: StubDetectorSession(spec)
    if getattr(args, "detector_cmd", None):
        return lambda: SubprocessDetectorSession(args.detector_cmd)
    raise ValidationError("need --stub-detector SPEC or --detector-cmd TEMPLATE")


def _tags(args, config: PipelineConfig) -> list[str]:
    specs = read_hashtag_csv(args.hashtags)
    return [s.tag for s in filter_by_views(specs, config.min_views)]


def cmd_ingest(args) -> int:
    config = _config(args)
    pipeline.stage_ingest(config, _tags(args, config), _client(args, config),
                          args.out, workers=args.workers)
    return 0


def cmd_curate_tags(args) -> int:
    config = _config(args)
    specs = read_hashtag_csv(args.inp)
    specs = filter_by_views(specs, config.min_views)
    if args.synonyms:
        specs = consolidate(specs, read_synonym_csv(args.synonyms))
    for warning in lint_gerunds(s.tag for s in specs):
        print(f"lint: {warning.message}", file=sys.stderr)
    write_hashtag_csv(specs, args.out)
    return 0


def cmd_scan(args) -> int:
    pipeline.stage_scan(_config(args), args.inp, args.out, workers=args.workers)
    return 0


def cmd_filter(args) -> int:
    pipeline.stage_filter(_config(args), args.inp, args.out,
                          _session_factory(args), workers=args.workers)
    return 0


def cmd_trim(args) -> int:
    pipeline.stage_trim(_config(args), args.inp, args.out)
    return 0


def cmd_stats(args) -> int:
    pipeline.stage_stats(args.inp, args.out_dir)
    return 0


def cmd_sample(args) -> int:
    manifest = read_manifest(args.inp)
    if args.stratified:
        n_clips, n_hashtags = (int(x) for x in args.stratified.split(","))
        subset = sample_stratified(manifest, n_clips, n_hashtags, args.seed)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_manifest(subset, out / f"stratified_{n_clips}_{n_hashtags}.manifest")
        return 0
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else ExperimentPlan().sizes
    plan = ExperimentPlan(sizes=sizes, runs_per_size=args.runs, master_seed=args.seed)
    write_subsets(sample_subsets(manifest, plan), args.out_dir)
    return 0


def cmd_analyze(args) -> int:
    analysis = analyze_scaling(read_results_csv(args.inp))
    write_scaling_file(analysis, args.out)
    return 0


def cmd_run_all(args) -> int:
    config = _config(args)
    final = pipeline.run_all(config, _tags(args, config), _client(args, config),
                             args.out_dir, _session_factory(args), workers=args.workers)
    print(final)
    return 0


def cmd_make_fixture(args) -> int:
    from .demo import build_demo_fixture

    fixture, stub, tags = build_demo_fixture(args.out_dir)
    print(f"fixture:  {fixture}")
    print(f"stub:     {stub}")
    print(f"hashtags: {tags}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clipforge",
                                     description="Short-video curation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--workers", type=int, default=4)
        p.add_argument("--seed", type=int, default=0)
        return p

    p = add("ingest", cmd_ingest, help="list and download videos per hashtag")
    p.add_argument("--hashtags", required=True, help="curated hashtag CSV")
    p.add_argument("--fixture", help="mock-source fixture directory")
    p.add_argument("--source", help="source API base URL")
    p.add_argument("--out", required=True, help="output manifest path")

    p = add("curate-tags", cmd_curate_tags, help="apply view floor and consolidation")
    p.add_argument("--in", dest="inp", required=True, help="raw hashtag CSV")
    p.add_argument("--synonyms", help="tag,canonical_action CSV")
    p.add_argument("--out", required=True)

    p = add("scan", cmd_scan, help="detect scenes in every asset")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("filter", cmd_filter, help="sample frames and run the person detector")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stub-detector", help="stub detector spec JSON")
    p.add_argument("--detector-cmd", help="backend command template")

    p = add("trim", cmd_trim, help="apply the clip duration policy")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = add("stats", cmd_stats, help="emit dataset statistics reports")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out-dir", required=True)

    p = add("sample", cmd_sample, help="draw experiment subsets")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--sizes", help="comma-separated subset sizes")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--stratified", help="N_CLIPS,N_HASHTAGS stratified draw")

    p = add("analyze", cmd_analyze, help="scaling analysis over a results file")
    p.add_argument("--in", dest="inp", required=True, help="size,run_id,top1,top5 CSV")
    p.add_argument("--out", required=True, help="scaling.v1 output path")

    p = add("run-all", cmd_run_all, help="ingest, scan, filter, trim, stats")
    p.add_argument("--hashtags", required=True)
    p.add_argument("--fixture", help="mock-source fixture directory")
    p.add_argument("--source", help="source API base URL")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--stub-detector")
    p.add_argument("--detector-cmd")

    p = add("make-fixture", cmd_make_fixture,
            help="write the offline 12-video demo fixture")
    p.add_argument("--out-dir", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            PipelineConfig.load(args.config)  # reject bad configs up front
        return args.fn(args)
    except DetectorError as exc:
        print(f"clipforge: detector error: {exc}", file=sys.stderr)
        return 3
    except (FileAccessError, MediaError, SourceError) as exc:
        print(f"clipforge: I/O error: {exc}", file=sys.stderr)
        return 2
    except ManifestError as exc:
        print(f"clipforge: manifest error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ClipforgeError) as exc:
        print(f"clipforge: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"clipforge: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
