from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refinery.corpus import (
    CONTINUATION_TAG,
    AlignedSegment,
    LanguageTag,
    Manifest,
    ManifestError,
    Provenance,
    Utterance,
    read_manifest,
    validate_record,
    write_manifest,
)


def make_record(**overrides) -> Utterance:
    base = dict(
        id="utt-x",
        audio_path="clips/x.wav",
        sample_rate_hz=16000,
        duration_s=2.0,
        text="你 好",
        lang=LanguageTag.ZH,
        source=Provenance.REAL,
    )
    base.update(overrides)
    return Utterance(**base)


class TestReadManifest:
    def test_empty_file_is_empty_manifest(self, tmp_path: Path):
        path = tmp_path / "empty.mf"
        path.write_text("")
        assert read_manifest(path).records == []

    def test_golden_fixture_field_by_field(self, data_dir: Path):
        m = read_manifest(data_dir / "golden_manifest.mf")
        assert len(m) == 3
        first = m.records[0]
        assert first.id == "utt-001"
        assert first.audio_path == "clips/utt-001.wav"
        assert first.sample_rate_hz == 16000
        assert first.duration_s == 2.0
        assert first.text == "你 好"
        assert first.lang is LanguageTag.ZH
        assert first.source is Provenance.REAL
        assert first.speaker == "spkA"
        assert first.segments == (
            AlignedSegment(0.0, 1.2, "你"),
            AlignedSegment(1.2, 2.0, "好"),
        )
        assert first.per_score is None and first.continued is False
        second = m.records[1]
        assert second.per_score == 0.25 and second.speaker is None
        third = m.records[2]
        assert third.continued is True
        assert third.text.endswith(CONTINUATION_TAG)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(FileNotFoundError):
            read_manifest(tmp_path / "nope.mf")

    def test_duplicate_id_names_id_and_lines(self, tmp_path: Path, data_dir: Path):
        lines = (data_dir / "golden_manifest.mf").read_text(encoding="utf-8").splitlines()
        path = tmp_path / "dup.mf"
        path.write_text("\n".join([lines[0], lines[1], lines[0]]) + "\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="utt-001"):
            read_manifest(path)

    def test_malformed_line_reports_line_number(self, tmp_path: Path, data_dir: Path):
        lines = (data_dir / "golden_manifest.mf").read_text(encoding="utf-8").splitlines()
        path = tmp_path / "bad.mf"
        path.write_text(lines[0] + "\n{not json\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="line 2"):
            read_manifest(path)

    def test_unknown_field_rejected(self, tmp_path: Path, data_dir: Path):
        line = (data_dir / "golden_manifest.mf").read_text(encoding="utf-8").splitlines()[0]
        doctored = line[:-1] + ',"extra":1}'
        path = tmp_path / "extra.mf"
        path.write_text(doctored + "\n", encoding="utf-8")
        with pytest.raises(ManifestError, match="unknown fields"):
            read_manifest(path)


class TestWriteManifest:
    def test_golden_round_trip_is_byte_identical(self, tmp_path: Path, data_dir: Path):
        golden = data_dir / "golden_manifest.mf"
        m = read_manifest(golden)
        out = tmp_path / "rt.mf"
        write_manifest(m, out)
        assert out.read_bytes() == golden.read_bytes()

    def test_empty_manifest_writes_zero_lines(self, tmp_path: Path):
        out = tmp_path / "empty.mf"
        write_manifest(Manifest(), out)
        assert out.read_bytes() == b""

    def test_overlapping_segments_refused(self, tmp_path: Path):
        bad = make_record(
            segments=(AlignedSegment(0.0, 1.5, "a"), AlignedSegment(1.0, 2.0, "b"))
        )
        with pytest.raises(ManifestError, match="overlap"):
            write_manifest(Manifest([bad]), tmp_path / "bad.mf")


class TestValidateRecord:
    def test_well_formed_record(self):
        assert validate_record(make_record()) == []

    def test_zero_duration_names_field(self):
        problems = validate_record(make_record(duration_s=0.0))
        assert len(problems) == 1 and "duration_s" in problems[0]

    def test_continued_without_tag_names_tag(self):
        problems = validate_record(make_record(continued=True))
        assert len(problems) == 1 and CONTINUATION_TAG in problems[0]

    def test_pseudo_labeled_requires_text(self):
        problems = validate_record(make_record(source=Provenance.PSEUDO_LABELED, text=""))
        assert any("pseudo_labeled" in p for p in problems)

    def test_segments_past_duration_tolerated_within_50ms(self):
        ok = make_record(segments=(AlignedSegment(0.0, 2.04, "a"),))
        assert validate_record(ok) == []
        bad = make_record(segments=(AlignedSegment(0.0, 2.2, "a"),))
        assert any("exceeds" in p for p in validate_record(bad))


_texts = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=0, max_size=12
)


def _segments_strategy():
    bounds = st.lists(
        st.integers(min_value=0, max_value=4000), min_size=2, max_size=6, unique=True
    ).map(sorted)
    token = st.text(alphabet="abc你好", min_size=1, max_size=3)

    def to_segments(args):
        cuts, tok = args
        return tuple(
            AlignedSegment(cuts[i] / 1000, cuts[i + 1] / 1000, tok)
            for i in range(len(cuts) - 1)
        )

    return st.tuples(bounds, token).map(to_segments)


_records = st.builds(
    Utterance,
    id=st.uuids().map(str),
    audio_path=st.just("clips/a.wav"),
    sample_rate_hz=st.just(16000),
    duration_s=st.integers(min_value=4000, max_value=60000).map(lambda ms: ms / 1000),
    text=_texts,
    lang=st.sampled_from(list(LanguageTag)),
    source=st.sampled_from([Provenance.REAL, Provenance.SYNTHETIC]),
    speaker=st.one_of(st.none(), st.text(alphabet="xyz0", min_size=1, max_size=4)),
    segments=st.one_of(st.none(), _segments_strategy()),
    per_score=st.one_of(st.none(), st.floats(0, 2).map(lambda x: round(x, 6))),
    continued=st.just(False),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(_records, max_size=8))
def test_round_trip_identity_property(tmp_path_factory, records):
    unique = {r.id: r for r in records}
    m = Manifest(list(unique.values()), name="prop")
    path = tmp_path_factory.mktemp("rt") / "m.mf"
    write_manifest(m, path)
    again = read_manifest(path)
    assert again.records == m.records
    # a manifest accepted by the reader contains no invalid records
    assert all(validate_record(r) == [] for r in again.records)
    # and a second write is byte-identical to the first
    path2 = tmp_path_factory.mktemp("rt") / "m2.mf"
    write_manifest(again, path2)
    assert path2.read_bytes() == path.read_bytes()
