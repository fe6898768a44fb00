"""Dataset-size scaling experiments: seeded subsets, stratified sampling,
and the diminishing-returns analysis over externally produced accuracies.

Subset selection uses the ``sha256-rank v1`` generator: every eligible
record gets a key ``sha256(master_seed:size:run_id:video_id:start)`` and the
``size`` smallest keys win. This is uniform sampling without replacement
that is reproducible bit-for-bit across platforms and Python versions, and
the generator name plus seed land in the subset manifest's provenance so
results stay auditable.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ValidationError
from .model import ClipRecord, DatasetManifest, ProvenanceEntry
from .manifest import write_manifest

GENERATOR = "sha256-rank v1"

DEFAULT_SIZES = (1000, 2000, 3000, 4000, 5000, 6000)


@dataclass(frozen=True, slots=True)
class ExperimentPlan:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    runs_per_size: int = 3
    master_seed: int = 0

    def __post_init__(self):
        if self.runs_per_size < 1:
            raise ValidationError("runs_per_size must be >= 1")
        if not self.sizes:
            raise ValidationError("plan needs at least one size")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValidationError("sizes must be strictly increasing")


@dataclass(frozen=True, slots=True)
class ScalingPoint:
    size: int
    run_id: int
    top1: float
    top5: float

    def __post_init__(self):
        for name in ("top1", "top5"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if self.top5 < self.top1:
            raise ValidationError(f"top5 {self.top5} < top1 {self.top1}")


def _rank_key(*parts) -> str:
    material = ":".join(str(p) for p in parts)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def _record_token(rec: ClipRecord) -> str:
    start = "-" if rec.clip_start_s is None else f"{rec.clip_start_s:.3f}"
    return f"{rec.video_id}:{start}"


def _subset_manifest(source: DatasetManifest, records: list[ClipRecord],
                     stage: str, seed_digest: str) -> DatasetManifest:
    records = sorted(
        records,
        key=lambda r: (r.video_id,
                       r.clip_start_s if r.clip_start_s is not None else float("-inf")),
    )
    assets = {r.video_id: source.assets[r.video_id] for r in records}
    return DatasetManifest(
        records=records,
        assets=assets,
        provenance=[*source.provenance,
                    ProvenanceEntry(stage, seed_digest, source.next_ts())],
        base_dir=source.base_dir,
    )


def sample_subsets(manifest: DatasetManifest,
                   plan: ExperimentPlan) -> dict[tuple[int, int], DatasetManifest]:
    """One subset manifest per (size, run): deterministic, without replacement,
    accepted records only."""
    eligible = manifest.accepted_records()
    if plan.sizes[-1] > len(eligible):
        raise ValidationError(
            f"largest size {plan.sizes[-1]} exceeds accepted-record count {len(eligible)}"
        )
    out = {}
    for size in plan.sizes:
        for run_id in range(plan.runs_per_size):
            ranked = sorted(
                eligible,
                key=lambda r: _rank_key(plan.master_seed, size, run_id, _record_token(r)),
            )
            chosen = ranked[:size]
            stage = f"sample[{size},{run_id}]"
            digest = _rank_key(GENERATOR, plan.master_seed)[:12]
            out[(size, run_id)] = _subset_manifest(manifest, chosen, stage, digest)
    return out


def largest_remainder_quotas(sizes: Sequence[int], n_clips: int) -> list[int]:
    """Allocate n_clips across groups proportionally to their sizes.

    Largest-remainder rounding, then repairs so every group gets at least 1
    and no group exceeds its size. Requires len(sizes) <= n_clips <= sum(sizes).
    """
    total = sum(sizes)
    if n_clips > total:
        raise ValidationError(f"cannot draw {n_clips} clips from {total} available")
    if n_clips < len(sizes):
        raise ValidationError(f"cannot give {len(sizes)} groups at least one of {n_clips} clips")

    raw = [n_clips * s / total for s in sizes]
    quotas = [int(r) for r in raw]
    remainder = n_clips - sum(quotas)
    order = sorted(range(len(sizes)), key=lambda i: (-(raw[i] - quotas[i]), i))
    for i in order[:remainder]:
        quotas[i] += 1

    # cap at group size, pushing overflow to groups with spare capacity
    for i in range(len(quotas)):
        if quotas[i] > sizes[i]:
            overflow = quotas[i] - sizes[i]
            quotas[i] = sizes[i]
            for j in sorted(range(len(quotas)), key=lambda j: (quotas[j] - sizes[j], j)):
                if overflow == 0:
                    break
                spare = sizes[j] - quotas[j]
                take = min(spare, overflow)
                quotas[j] += take
                overflow -= take

    # every group contributes at least one clip
    for i in range(len(quotas)):
        if quotas[i] == 0:
            donor = max(range(len(quotas)), key=lambda j: (quotas[j], -j))
            if quotas[donor] <= 1:
                raise ValidationError("infeasible stratified allocation")
            quotas[donor] -= 1
            quotas[i] = 1
    return quotas


def sample_stratified(manifest: DatasetManifest, n_clips: int, n_hashtags: int,
                      seed: int) -> DatasetManifest:
    """Pick n_hashtags tags uniformly at random (seeded), then draw clips
    proportionally to tag size until n_clips are chosen."""
    if n_clips < n_hashtags:
        raise ValidationError("n_clips must be >= n_hashtags (every tag contributes a clip)")
    by_tag: dict[str, list[ClipRecord]] = {}
    for rec in manifest.accepted_records():
        tag = manifest.assets[rec.video_id].hashtag
        by_tag.setdefault(tag, []).append(rec)
    if len(by_tag) < n_hashtags:
        raise ValidationError(
            f"corpus has {len(by_tag)} distinct tags, need {n_hashtags}"
        )

    tags = sorted(by_tag, key=lambda t: _rank_key(seed, "tag", t))[:n_hashtags]
    tags.sort()
    sizes = [len(by_tag[t]) for t in tags]
    if sum(sizes) < n_clips:
        raise ValidationError(
            f"selected tags hold {sum(sizes)} accepted records, need {n_clips}"
        )

    quotas = largest_remainder_quotas(sizes, n_clips)
    chosen: list[ClipRecord] = []
    for tag, quota in zip(tags, quotas):
        ranked = sorted(by_tag[tag],
                        key=lambda r: _rank_key(seed, "clip", tag, _record_token(r)))
        chosen.extend(ranked[:quota])

    stage = f"stratified[{n_clips},{n_hashtags}]"
    return _subset_manifest(manifest, chosen, stage, _rank_key(GENERATOR, seed)[:12])


@dataclass(frozen=True)
class ScalingAnalysis:
    sizes: tuple[int, ...]
    mean_top1: dict[int, float]
    mean_top5: dict[int, float]
    marginal_gains: tuple[float, ...] = field(default=())
    diminishing: bool = False
    knee_size: int | None = None


def analyze_scaling(points: Iterable[ScalingPoint]) -> ScalingAnalysis:
    """Mean accuracy per size and a diminishing-returns verdict.

    With the gain sequence g_1..g_m between consecutive sizes (plus a
    virtual zero-gain baseline g_0), returns diminish when some suffix of
    gains sits strictly below the best gain seen before it. The knee is the
    size where the largest drop between consecutive gains lands (earliest
    on ties): the last size that still saw the big improvement.
    """
    points = list(points)
    by_size: dict[int, list[ScalingPoint]] = {}
    for p in points:
        by_size.setdefault(p.size, []).append(p)
    if len(by_size) < 3:
        raise ValidationError("need at least 3 distinct sizes to analyze scaling")

    sizes = tuple(sorted(by_size))
    mean_top1 = {s: sum(p.top1 for p in by_size[s]) / len(by_size[s]) for s in sizes}
    mean_top5 = {s: sum(p.top5 for p in by_size[s]) / len(by_size[s]) for s in sizes}

    gains = [mean_top1[b] - mean_top1[a] for a, b in zip(sizes, sizes[1:])]
    padded = [0.0, *gains]  # virtual baseline: no gain before the first size

    diminishing = False
    for j in range(1, len(padded)):
        # epsilon keeps float dust in the means from faking a drop
        if max(padded[j:]) < max(padded[:j]) - 1e-9:
            diminishing = True
            break

    knee = None
    if diminishing:
        drops = [padded[i] - padded[i + 1] for i in range(len(padded) - 1)]
        knee = sizes[max(range(len(drops)), key=lambda i: (drops[i], -i))]

    return ScalingAnalysis(
        sizes=sizes,
        mean_top1=mean_top1,
        mean_top5=mean_top5,
        marginal_gains=tuple(gains),
        diminishing=diminishing,
        knee_size=knee,
    )


def read_results_csv(path: str | Path) -> list[ScalingPoint]:
    """Rows ``size,run_id,top1,top5`` (header optional)."""
    path = Path(path)
    points = []
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or (lineno == 1 and row[0].strip() == "size"):
                    continue
                try:
                    points.append(ScalingPoint(int(row[0]), int(row[1]),
                                               float(row[2]), float(row[3])))
                except (IndexError, ValueError) as exc:
                    raise ValidationError(f"{path} line {lineno}: bad results row ({exc})") from exc
    except OSError as exc:
        raise ValidationError(f"cannot read results file {path}: {exc}") from exc
    return points


def write_scaling_file(analysis: ScalingAnalysis, path: str | Path) -> None:
    payload = {
        "format": "scaling.v1",
        "sizes": list(analysis.sizes),
        "mean_top1": {str(s): f"{analysis.mean_top1[s]:.6f}" for s in analysis.sizes},
        "mean_top5": {str(s): f"{analysis.mean_top5[s]:.6f}" for s in analysis.sizes},
        "marginal_gains": [f"{g:.6f}" for g in analysis.marginal_gains],
        "diminishing": analysis.diminishing,
        "knee_size": analysis.knee_size,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def write_subsets(subsets: dict[tuple[int, int], DatasetManifest],
                  out_dir: str | Path) -> list[Path]:
    """Write each subset as ``subset_<size>_<run>.manifest``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for (size, run_id), subset in sorted(subsets.items()):
        dest = out_dir / f"subset_{size}_{run_id}.manifest"
        write_manifest(subset, dest)
        paths.append(dest)
    return paths
