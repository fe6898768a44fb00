"""Hashtag list curation: normalization, view floor, consolidation, lint.

Umbrella-term choice, specification, noun substitution, and noun-verb order
are editorial judgments, not algorithms; the tooling supports them with a
lint that flags gerund-led tags and suggests the noun remainder. Synonym
grouping comes from an explicit user-supplied map, never string similarity.
"""

from __future__ import annotations

import csv
import enum
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ValidationError

log = logging.getLogger(__name__)


class Category(enum.Enum):
    DANCE = "dance"
    SPORTS = "sports"
    FITNESS = "fitness"
    KINETICS = "kinetics"
    SOCIAL_CULTURAL = "social_cultural"


@dataclass(frozen=True, slots=True)
class HashtagSpec:
    tag: str
    views: int
    category: Category
    canonical_action: str

    def __post_init__(self):
        if normalize(self.tag) != self.tag:
            raise ValidationError(f"tag {self.tag!r} is not normalized")
        if self.views < 0:
            raise ValidationError(f"tag {self.tag}: views must be >= 0")


def normalize(raw: str) -> str:
    """Strip leading '#', lowercase, drop non-alphanumerics. Idempotent."""
    if not raw:
        raise ValidationError("empty hashtag")
    stripped = raw.lstrip("#").lower()
    cleaned = "".join(ch for ch in stripped if ch.isalnum())
    if not cleaned:
        raise ValidationError(f"hashtag {raw!r} is empty after normalization")
    return cleaned


def filter_by_views(specs: Iterable[HashtagSpec], min_views: int) -> list[HashtagSpec]:
    """Keep tags with views >= min_views; input order preserved."""
    if min_views < 0:
        raise ValidationError("min_views must be >= 0")
    return [s for s in specs if s.views >= min_views]


def _beats(a: HashtagSpec, b: HashtagSpec) -> bool:
    """Higher views win; view ties go to the lexicographically smaller tag."""
    return a.views > b.views or (a.views == b.views and a.tag < b.tag)


def consolidate(specs: Iterable[HashtagSpec],
                synonym_map: Mapping[str, str]) -> list[HashtagSpec]:
    """Keep one tag per canonical action: the highest-viewed (ties: lexicographically
    smaller tag). Tags missing from the map stand as their own action, with a warning."""
    best: dict[str, HashtagSpec] = {}
    order: list[str] = []
    for spec in specs:
        action = synonym_map.get(spec.tag)
        if action is None:
            log.warning("tag %r missing from synonym map; kept as its own action", spec.tag)
            action = spec.tag
        keyed = HashtagSpec(spec.tag, spec.views, spec.category, action)
        current = best.get(action)
        if current is None:
            best[action] = keyed
            order.append(action)
        elif _beats(keyed, current):
            best[action] = keyed
    return [best[action] for action in order]


@dataclass(frozen=True, slots=True)
class LintWarning:
    tag: str
    suggestion: str
    message: str


_GERUND = re.compile(r"^([a-z]{2,}ing)(.+)$")


def lint_gerunds(tags: Iterable[str]) -> list[LintWarning]:
    """Flag tags that start with a gerund and suggest the noun remainder,
    e.g. 'playingpiano' -> 'piano'. Heuristic guidance only."""
    warnings = []
    for tag in tags:
        m = _GERUND.match(tag)
        if m:
            warnings.append(
                LintWarning(
                    tag=tag,
                    suggestion=m.group(2),
                    message=f"tag {tag!r} starts with gerund {m.group(1)!r}; "
                    f"noun form {m.group(2)!r} usually reaches more videos",
                )
            )
    return warnings


def read_hashtag_csv(path: str | Path) -> list[HashtagSpec]:
    """Rows ``tag,views,category[,canonical_action]``; header required.
    Tags are normalized on read."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "tag" not in reader.fieldnames:
                raise ValidationError(f"{path}: missing header row with 'tag' column")
            specs = []
            for row in reader:
                try:
                    tag = normalize(row["tag"])
                    canonical = (row.get("canonical_action") or "").strip() or tag
                    specs.append(
                        HashtagSpec(
                            tag=tag,
                            views=int(row["views"]),
                            category=Category(row["category"].strip()),
                            canonical_action=canonical,
                        )
                    )
                except (KeyError, ValueError) as exc:
                    raise ValidationError(
                        f"{path} line {reader.line_num}: bad hashtag row ({exc})"
                    ) from exc
            return specs
    except OSError as exc:
        raise ValidationError(f"cannot read hashtag list {path}: {exc}") from exc


def write_hashtag_csv(specs: Iterable[HashtagSpec], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tag", "views", "category", "canonical_action"])
        for s in specs:
            writer.writerow([s.tag, s.views, s.category.value, s.canonical_action])


def read_synonym_csv(path: str | Path) -> dict[str, str]:
    """Rows ``tag,canonical_action``; header required."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "tag" not in reader.fieldnames:
                raise ValidationError(f"{path}: missing header row with 'tag' column")
            mapping = {}
            for row in reader:
                try:
                    mapping[normalize(row["tag"])] = row["canonical_action"].strip()
                except (KeyError, AttributeError) as exc:
                    raise ValidationError(
                        f"{path} line {reader.line_num}: bad synonym row ({exc})"
                    ) from exc
            return mapping
    except OSError as exc:
        raise ValidationError(f"cannot read synonym map {path}: {exc}") from exc
