"""Hashtag normalization, view floor, consolidation, and gerund lint."""

import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clipforge.errors import ValidationError
from clipforge.hashtags import (
    Category,
    HashtagSpec,
    consolidate,
    filter_by_views,
    lint_gerunds,
    normalize,
    read_hashtag_csv,
    read_synonym_csv,
    write_hashtag_csv,
)


def spec(tag, views, category=Category.KINETICS, action=None):
    return HashtagSpec(tag, views, category, action or tag)


class TestNormalize:
    def test_strips_hash_and_case(self):
        assert normalize("#PlayingPiano") == "playingpiano"

    def test_identity_on_clean_tag(self):
        assert normalize("piano") == "piano"

    def test_empty_after_strip_is_error(self):
        with pytest.raises(ValidationError, match="empty"):
            normalize("##")

    def test_drops_punctuation(self):
        assert normalize("#shoe-repair!") == "shoerepair"

    @given(st.text(min_size=1, max_size=20))
    def test_idempotent(self, raw):
        try:
            once = normalize(raw)
        except ValidationError:
            return
        assert normalize(once) == once


class TestViewFloor:
    def test_table_values_pass_floor(self):
        specs = [spec("piano", 44_400_000_000), spec("playingpiano", 29_400_000)]
        kept = filter_by_views(specs, 5_000_000)
        assert [s.tag for s in kept] == ["piano", "playingpiano"]

    def test_below_floor_dropped(self):
        kept = filter_by_views([spec("tag", 3_000_000)], 5_000_000)
        assert kept == []

    def test_order_preserved_and_subsequence(self):
        specs = [spec("a", 10), spec("b", 1), spec("c", 10), spec("d", 5)]
        kept = filter_by_views(specs, 5)
        assert [s.tag for s in kept] == ["a", "c", "d"]


class TestConsolidate:
    CUTTING = {
        "cuttingcakes": "cutting",
        "cutfruit": "cutting",
        "applecutting": "cutting",
    }

    def test_keeps_highest_viewed_in_group(self):
        specs = [
            spec("cuttingcakes", 9_000_000),
            spec("cutfruit", 2_000_000),
            spec("applecutting", 1_000_000),
        ]
        kept = consolidate(specs, self.CUTTING)
        assert [s.tag for s in kept] == ["cuttingcakes"]
        assert kept[0].canonical_action == "cutting"

    def test_disjoint_actions_unchanged(self):
        specs = [spec("salsa", 10), spec("tango", 20)]
        kept = consolidate(specs, {"salsa": "salsa", "tango": "tango"})
        assert [s.tag for s in kept] == ["salsa", "tango"]

    def test_view_tie_keeps_lexicographically_smaller(self):
        specs = [spec("zebra", 10), spec("apple", 10)]
        kept = consolidate(specs, {"zebra": "x", "apple": "x"})
        assert [s.tag for s in kept] == ["apple"]

    def test_missing_tag_warns_and_stands_alone(self, caplog):
        specs = [spec("cuttingcakes", 9), spec("juggling", 5)]
        with caplog.at_level(logging.WARNING):
            kept = consolidate(specs, self.CUTTING)
        assert [s.tag for s in kept] == ["cuttingcakes", "juggling"]
        assert any("juggling" in r.message for r in caplog.records)

    def test_at_most_one_tag_per_action(self):
        specs = [spec(t, v) for t, v in
                 [("a1", 5), ("a2", 9), ("b1", 3), ("b2", 3), ("c1", 1)]]
        mapping = {"a1": "a", "a2": "a", "b1": "b", "b2": "b", "c1": "c"}
        kept = consolidate(specs, mapping)
        actions = [s.canonical_action for s in kept]
        assert len(actions) == len(set(actions)) == 3


class TestLint:
    def test_flags_gerund_prefix(self):
        warnings = lint_gerunds(["playingpiano", "piano"])
        assert len(warnings) == 1
        assert warnings[0].tag == "playingpiano"
        assert warnings[0].suggestion == "piano"

    def test_noun_only_tags_clean(self):
        assert lint_gerunds(["boxing", "sax", "mopping"]) == []

    def test_cutting_flagged(self):
        warnings = lint_gerunds(["cuttingcakes"])
        assert warnings and warnings[0].suggestion == "cakes"


class TestCsv:
    def test_round_trip(self, tmp_path):
        specs = [
            HashtagSpec("piano", 44_400_000_000, Category.KINETICS, "piano"),
            HashtagSpec("salsa", 2_100_000_000, Category.DANCE, "salsa"),
        ]
        path = tmp_path / "tags.csv"
        write_hashtag_csv(specs, path)
        assert read_hashtag_csv(path) == specs

    def test_normalizes_on_read(self, tmp_path):
        path = tmp_path / "tags.csv"
        path.write_text("tag,views,category\n#PlayingPiano,2,kinetics\n")
        assert read_hashtag_csv(path)[0].tag == "playingpiano"

    def test_unknown_category_rejected(self, tmp_path):
        path = tmp_path / "tags.csv"
        path.write_text("tag,views,category\npiano,2,music\n")
        with pytest.raises(ValidationError):
            read_hashtag_csv(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "tags.csv"
        path.write_text("piano,2,kinetics\n")
        with pytest.raises(ValidationError, match="header"):
            read_hashtag_csv(path)

    def test_synonym_map(self, tmp_path):
        path = tmp_path / "syn.csv"
        path.write_text("tag,canonical_action\ncutfruit,cutting\n")
        assert read_synonym_csv(path) == {"cutfruit": "cutting"}

    def test_repo_sample_fixture_parses(self):
        from pathlib import Path

        fixtures = Path(__file__).parent.parent / "fixtures"
        specs = read_hashtag_csv(fixtures / "hashtags_sample.csv")
        assert any(s.tag == "piano" for s in specs)
        mapping = read_synonym_csv(fixtures / "synonyms_sample.csv")
        assert mapping["cutfruit"] == "cutting"


class TestComposition:
    def test_pipeline_order_yields_valid_specs(self):
        raw = [
            ("#Piano", 44_400_000_000),
            ("#PlayingPiano", 29_400_000),
            ("#CuttingCakes", 9_000_000),
            ("#CutFruit", 2_000_000),
            ("#Mopping", 15_000_000),
        ]
        specs = [spec(normalize(t), v) for t, v in raw]
        specs = filter_by_views(specs, 5_000_000)
        mapping = {"piano": "piano", "playingpiano": "piano",
                   "cuttingcakes": "cutting", "cutfruit": "cutting",
                   "mopping": "mopping"}
        final = consolidate(specs, mapping)
        assert [s.tag for s in final] == ["piano", "cuttingcakes", "mopping"]
        for s in final:
            assert normalize(s.tag) == s.tag
            assert s.views >= 5_000_000
