from __future__ import annotations

import random
from itertools import product
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_pairs_bfs_distances, bfs_edit_distance
from refinery.backends import MockChannelConfig, hallucinated_tokens
from refinery.corpus import LanguageTag, Manifest
from refinery.filtering import (
    FilterConfig,
    Phonemizer,
    PhonemeSequence,
    default_phonemizer,
    edit_distance,
    filter_pairs,
    load_homophone_groups,
    per,
    phonemize,
)
from refinery.fixtures import mock_endpoint, sample_zh_text, text_manifest
from refinery.synthesis import SpeakerPool, synthesize_corpus


class TestPhonemize:
    def test_homophone_pair_identical(self):
        assert phonemize("好").phonemes == phonemize("号").phonemes == ("h", "ao")

    def test_empty_text(self):
        assert phonemize("").phonemes == ()

    def test_lexicon_word(self):
        assert phonemize("cat").phonemes == ("K", "AE", "T")

    def test_letter_fallback_for_unknown_word(self):
        assert phonemize("zqzq").phonemes == ("Z", "Q", "Z", "Q")

    def test_mixed_text_by_script(self):
        assert phonemize("gpu加速").phonemes[:3] == ("G", "P", "U")

    def test_unknown_han_gets_counted_placeholder(self):
        pz = Phonemizer.builtin()
        before = pz.unknown_han_count
        seq = pz.phonemize("龥")  # not in the bundled table
        assert pz.unknown_han_count == before + 1
        assert seq.phonemes == ("U+9FA5",)

    def test_punctuation_carries_no_phonemes(self):
        assert phonemize("好。").phonemes == phonemize("好").phonemes

    def test_digits_are_symbols(self):
        assert phonemize("42").phonemes == ("4", "2")

    def test_bundled_homophone_groups_collapse(self):
        pz = default_phonemizer()
        for group in load_homophone_groups():
            seqs = {pz.phonemize(token).phonemes for token in group}
            assert len(seqs) == 1, f"group {group} phonemizes inconsistently: {seqs}"

    def test_external_table_loads(self, tmp_path: Path):
        table = tmp_path / "table.tsv"
        table.write_text("好\tX Y\ncat\tK AT\n", encoding="utf-8")
        pz = Phonemizer.from_external_table(table)
        assert pz.phonemize("好").phonemes == ("X", "Y")
        assert pz.phonemize("CAT").phonemes == ("K", "AT")

    def test_symbols_reject_whitespace(self):
        with pytest.raises(ValueError):
            PhonemeSequence(("a b",))


class TestEditDistance:
    def test_identical(self):
        assert edit_distance(["k", "a", "t"], ["k", "a", "t"]) == 0

    def test_single_deletion(self):
        assert edit_distance(["k", "a", "t"], ["k", "a"]) == 1

    def test_worked_example_against_bfs_oracle(self):
        ref, hyp = ("k", "a", "t"), ("k", "ae", "t", "s")
        assert edit_distance(ref, hyp) == 2
        assert bfs_edit_distance(ref, hyp) == 2

    def test_exhaustive_small_alphabet_against_graph_oracle(self):
        alphabet = ("a", "b")
        oracle = all_pairs_bfs_distances(alphabet, max_len=3)
        pool = [p for n in range(4) for p in product(alphabet, repeat=n)]
        for ref in pool:
            for hyp in pool:
                assert edit_distance(ref, hyp) == oracle[(ref, hyp)], (ref, hyp)

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(st.sampled_from("abc"), max_size=8),
        st.lists(st.sampled_from("abc"), max_size=8),
        st.lists(st.sampled_from("abc"), max_size=8),
    )
    def test_metric_axioms(self, x, y, z):
        assert edit_distance(x, y) >= 0
        assert (edit_distance(x, y) == 0) == (x == y)
        assert edit_distance(x, y) == edit_distance(y, x)
        assert edit_distance(x, z) <= edit_distance(x, y) + edit_distance(y, z)


class TestPer:
    def test_identical_zero(self):
        assert per("今 天 很 好", "今 天 很 好") == 0.0

    def test_half_at_distance_two(self):
        # ref has 4 phonemes (two Han chars); hyp swaps one char entirely
        ref, hyp = "今 天", "今 书"
        assert len(phonemize(ref)) == 4
        assert edit_distance(phonemize(ref).phonemes, phonemize(hyp).phonemes) == 2
        assert per(ref, hyp) == 0.5

    def test_homophone_scores_zero(self):
        assert per("好", "号") == 0.0

    def test_homophone_invariance_over_bundled_set(self):
        for group in load_homophone_groups():
            for a in group:
                for b in group:
                    assert per(a, b) == 0.0

    def test_can_exceed_one(self):
        assert per("好", "好 serendipity monstrous") > 1.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            per("", "anything")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sampled_from("你 好 学 校 cat dog".split()), min_size=1, max_size=6))
    def test_self_per_zero_property(self, tokens):
        text = " ".join(tokens)
        assert per(text, text) == 0.0


def _synth_corpus(tmp_path: Path, texts: list[str], hallucination_rate: float, seed: int):
    tts = mock_endpoint("tts", seed=seed, hallucination_rate=hallucination_rate)
    manifest = text_manifest(texts, LanguageTag.ZH, "pairs")
    result = synthesize_corpus(
        manifest, tts, SpeakerPool(("s0", "s1"), seed=seed), out_dir=tmp_path / "wav"
    )
    assert len(result.rejects) == 0
    return result.synthesized, MockChannelConfig.from_params(tts.params)


class TestFilterPairs:
    def test_boundary_below_alpha_kept_at_alpha_removed(self, tmp_path: Path):
        # craft references whose PER lands exactly at 0.59 and 0.60 against
        # a validator that reads back the audio exactly: impossible, so use
        # direct construction: alpha 0.6 against per computed from texts
        texts = ["今 天 很 好 看"]
        synth, _ = _synth_corpus(tmp_path, texts, 0.0, seed=3)
        outcome = filter_pairs(
            synth,
            FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=3)),
        )
        assert len(outcome.kept) == 1 and outcome.kept.records[0].per_score == 0.0

    def test_per_score_set_on_both_sides(self, tmp_path: Path):
        rng = random.Random(0)
        texts = [sample_zh_text(rng, 4, 6) for _ in range(30)]
        synth, cfg = _synth_corpus(tmp_path, texts, 0.5, seed=9)
        outcome = filter_pairs(
            synth,
            FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=9)),
        )
        assert len(outcome.kept) + len(outcome.removed) == len(synth)
        for record in list(outcome.kept) + list(outcome.removed):
            assert record.per_score is not None

    def test_removed_set_is_exactly_the_hallucinated_subset(self, tmp_path: Path):
        rng = random.Random(1)
        texts = list({sample_zh_text(rng, 4, 6) for _ in range(120)})
        synth, cfg = _synth_corpus(tmp_path, texts, 0.3, seed=11)
        outcome = filter_pairs(
            synth,
            FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=11)),
            parallelism=4,
        )
        hallucinated = {
            r.id
            for r in synth
            if hallucinated_tokens(cfg, r.text, r.speaker)
        }
        assert {r.id for r in outcome.removed} == hallucinated
        assert {r.id for r in outcome.kept} == {r.id for r in synth} - hallucinated

    def test_partition_disjoint_and_complete(self, tmp_path: Path):
        rng = random.Random(2)
        texts = [sample_zh_text(rng, 4, 6) for _ in range(25)]
        synth, _ = _synth_corpus(tmp_path, texts, 0.4, seed=13)
        outcome = filter_pairs(
            synth,
            FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=13)),
        )
        kept_ids = set(outcome.kept.ids())
        removed_ids = set(outcome.removed.ids())
        reject_ids = set(outcome.rejects.ids())
        assert kept_ids | removed_ids | reject_ids == set(synth.ids())
        assert not (kept_ids & removed_ids)
        assert not (kept_ids & reject_ids)
        assert not (removed_ids & reject_ids)

    def test_unreadable_audio_routes_to_rejects(self, tmp_path: Path):
        texts = ["今 天 很 好"]
        synth, _ = _synth_corpus(tmp_path, texts, 0.0, seed=5)
        broken = synth.records[0].evolved(audio_path=str(tmp_path / "missing.wav"))
        outcome = filter_pairs(
            Manifest([broken], name="broken"),
            FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=5)),
        )
        assert len(outcome.rejects) == 1 and len(outcome.kept) == 0

    def test_alpha_validated(self):
        with pytest.raises(ValueError):
            FilterConfig(alpha=1.5)
