from __future__ import annotations

from pathlib import Path

import pytest

from refinery.corpus import Manifest, Provenance
from refinery.filtering import default_phonemizer, load_homophone_groups
from refinery.fixtures import mock_endpoint, render_speech_fixtures
from refinery.pseudo_label import pseudo_label_corpus


def test_clean_clips_get_their_embedded_tokens(tmp_path: Path, mock_chain):
    speech = render_speech_fixtures(tmp_path, count=3, seed=7)
    result = pseudo_label_corpus(speech, mock_chain["asr"])
    assert len(result.labeled) == 3 and len(result.rejects) == 0
    asr = mock_chain["asr"]
    for original, labeled in zip(speech, result.labeled):
        assert labeled.id == original.id
        assert labeled.source is Provenance.PSEUDO_LABELED
        assert labeled.text
        # the fixture audio decodes exactly; re-decode as the oracle
        from refinery.audio import read_wav
        from refinery.backends import transcribe

        assert labeled.text == transcribe(asr, read_wav(original.audio_path))


def test_empty_manifest_gives_empty_output(mock_chain):
    result = pseudo_label_corpus(Manifest(), mock_chain["asr"])
    assert len(result.labeled) == 0 and len(result.rejects) == 0


def test_full_substitution_differs_only_by_homophones(tmp_path: Path):
    speech = render_speech_fixtures(tmp_path, count=10, seed=3)
    table = {
        token: tuple(o for o in group if o != token)
        for group in load_homophone_groups()
        for token in group
    }
    asr = mock_endpoint("asr", seed=3, substitution_rate=1.0, homophone_table=table)
    clean = mock_endpoint("asr", seed=3)
    result = pseudo_label_corpus(speech, asr, parallelism=2)
    pz = default_phonemizer()
    from refinery.audio import read_wav
    from refinery.backends import transcribe

    changed = 0
    for original, labeled in zip(speech, result.labeled):
        truth = transcribe(clean, read_wav(original.audio_path))
        truth_tokens = truth.split()
        out_tokens = labeled.text.split()
        assert len(out_tokens) == len(truth_tokens)
        for a, b in zip(truth_tokens, out_tokens):
            if a != b:
                changed += 1
                assert b in table.get(a, ()), f"{b!r} is not a homophone of {a!r}"
                assert pz.phonemize(a).phonemes == pz.phonemize(b).phonemes
    assert changed > 0


def test_counts_partition_input(tmp_path: Path, mock_chain):
    speech = render_speech_fixtures(tmp_path, count=6, seed=1)
    broken = speech.records[2].evolved(audio_path=str(tmp_path / "gone.wav"))
    speech = Manifest(speech.records[:2] + [broken] + speech.records[3:], name="s")
    result = pseudo_label_corpus(speech, mock_chain["asr"])
    assert len(result.labeled) + len(result.rejects) == len(speech)
    assert result.rejects.ids() == [broken.id]


def test_failure_rate_abort(tmp_path: Path, mock_chain):
    speech = render_speech_fixtures(tmp_path, count=4, seed=2)
    broken = Manifest(
        [r.evolved(audio_path=str(tmp_path / f"gone{i}.wav")) for i, r in enumerate(speech)],
        name="broken",
    )
    with pytest.raises(RuntimeError, match="abort"):
        pseudo_label_corpus(broken, mock_chain["asr"])


def test_wrong_role_rejected(tmp_path: Path, mock_chain):
    with pytest.raises(ValueError, match="role"):
        pseudo_label_corpus(Manifest(), mock_chain["tts"])
