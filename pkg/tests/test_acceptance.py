"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines; every tolerance is pinned here, not configured elsewhere.
"""

from __future__ import annotations

import functools
import math
import random
import shutil
import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest

from oracles import all_pairs_bfs_distances, reference_cer, reference_wer
from refinery.alignment import parse_textgrid, plan_snippets
from refinery.audio import AudioBuffer, mix_noise_at_snr, read_wav, rms_power, white_noise
from refinery.augment import AugmentConfig, assemble_long_form, build_clip
from refinery.backends import MockChannelConfig, hallucinated_tokens
from refinery.cli import main
from refinery.corpus import (
    CONTINUATION_TAG,
    AlignedSegment,
    LanguageTag,
    Manifest,
    Provenance,
    Utterance,
    read_manifest,
    write_manifest,
)
from refinery.evaluate import evaluate_manifest, mer
from refinery.filtering import FilterConfig, edit_distance, filter_pairs
from refinery.fixtures import mock_endpoint, sample_zh_text, text_manifest
from refinery.synthesis import SpeakerPool, synthesize_corpus

RATE = 16000
CONFIG = Path(__file__).parent.parent / "configs" / "mock_loop.cfg"


def criterion(name: str):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                value = fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE  FAIL  {name}")
                raise
            print(f"\nACCEPTANCE  PASS  {name}")
            return value

        return wrapper

    return decorate


def _synthesize_pairs(tmp_path: Path, count: int, hallucination_rate: float, seed: int):
    rng = random.Random(seed)
    texts = [sample_zh_text(rng, 4, 6) for _ in range(count)]
    tts = mock_endpoint("tts", seed=seed, hallucination_rate=hallucination_rate)
    result = synthesize_corpus(
        text_manifest(texts, LanguageTag.ZH, "acc"),
        tts,
        SpeakerPool(tuple(f"v{i:02d}" for i in range(8)), seed=seed),
        parallelism=4,
        out_dir=tmp_path / "wav",
    )
    assert len(result.rejects) == 0
    return result.synthesized, MockChannelConfig.from_params(tts.params)


@criterion("filter efficacy: >=95% hallucinated removed, >=95% clean kept, <60 s")
def test_filter_efficacy(tmp_path: Path):
    started = time.monotonic()
    synth, cfg = _synthesize_pairs(tmp_path, 500, hallucination_rate=0.2, seed=101)
    outcome = filter_pairs(
        synth,
        FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=101)),
        parallelism=4,
    )
    elapsed = time.monotonic() - started
    hallucinated = {r.id for r in synth if hallucinated_tokens(cfg, r.text, r.speaker)}
    clean = set(synth.ids()) - hallucinated
    assert hallucinated, "the seeded corpus must contain corrupted pairs"
    removed = set(outcome.removed.ids())
    kept = set(outcome.kept.ids())
    caught = len(hallucinated & removed) / len(hallucinated)
    retained = len(clean & kept) / len(clean)
    assert caught >= 0.95, f"only {caught:.1%} of corrupted pairs were removed"
    assert retained >= 0.95, f"only {retained:.1%} of clean pairs survived"
    assert elapsed < 60.0, f"took {elapsed:.1f} s"


@criterion("retention: 40% +/- 5% kept when expected removal is 60%")
def test_retention_analog(tmp_path: Path):
    # every corrupted pair lands above the threshold, so a 0.6 corruption
    # rate makes the expected removal rate 60%
    synth, _ = _synthesize_pairs(tmp_path, 2000, hallucination_rate=0.6, seed=202)
    outcome = filter_pairs(
        synth,
        FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=202)),
        parallelism=4,
    )
    retention = len(outcome.kept) / len(synth)
    assert 0.35 <= retention <= 0.45, f"retention {retention:.3f} outside 0.40 +/- 0.05"


@criterion("edit distance: exhaustive agreement with edit-script search, <30 s")
def test_edit_distance_oracle_equivalence():
    started = time.monotonic()
    alphabet = ("a", "b", "c")
    oracle = all_pairs_bfs_distances(alphabet, max_len=5)
    pool = [p for n in range(6) for p in product(alphabet, repeat=n)]
    assert len(pool) ** 2 == 132_496
    for ref in pool:
        for hyp in pool:
            assert edit_distance(ref, hyp) == oracle[(ref, hyp)], (ref, hyp)
    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"took {elapsed:.1f} s"


@criterion("MER equals CER on pure-Han and WER on pure-Latin text, exactly")
def test_mer_against_cer_wer_oracles():
    han_pool = "你好我们今天去学校看书说话时间工作生活东西南北"
    latin_pool = "the cat sat on a mat with good data model speech test".split()
    rng = random.Random(33)
    for _ in range(1000):
        ref = "".join(rng.choice(han_pool) for _ in range(rng.randint(1, 14)))
        hyp = "".join(rng.choice(han_pool) for _ in range(rng.randint(0, 14)))
        assert mer(ref, hyp) == reference_cer(ref, hyp)
    for _ in range(1000):
        ref = " ".join(rng.choice(latin_pool) for _ in range(rng.randint(1, 12)))
        hyp = " ".join(rng.choice(latin_pool) for _ in range(rng.randint(0, 12)))
        assert mer(ref, hyp) == reference_wer(ref, hyp)
    # micro-average worked example: edits 1/3 + 0/2 aggregate to exactly 1/5
    refs = Manifest(
        [
            Utterance(id="a", audio_path="", sample_rate_hz=RATE, duration_s=1.0,
                      text="我 們 today", lang=LanguageTag.MIXED, source=Provenance.REAL),
            Utterance(id="b", audio_path="", sample_rate_hz=RATE, duration_s=1.0,
                      text="你 好", lang=LanguageTag.ZH, source=Provenance.REAL),
        ],
        name="refs",
    )
    hyps = Manifest(
        [refs.records[0].evolved(text="我 天 today"), refs.records[1]], name="hyps"
    )
    assert evaluate_manifest(refs, hyps).mer == 1 / 5


def _aligned_pool(tmp_path: Path, count: int, seed: int) -> Manifest:
    from refinery.audio import write_wav

    rng = random.Random(seed)
    records = []
    for i in range(count):
        duration = round(rng.uniform(3.0, 5.0), 3)
        n_tokens = rng.randint(2, 5)
        cuts = sorted(round(rng.uniform(0.3, duration - 0.2), 3) for _ in range(n_tokens - 1))
        bounds = [0.0] + cuts + [duration]
        segments = tuple(
            AlignedSegment(bounds[j], bounds[j + 1], f"u{i}w{j}") for j in range(len(bounds) - 1)
        )
        noise = np.random.default_rng(seed * 1000 + i).uniform(-0.3, 0.3, int(duration * RATE))
        path = tmp_path / f"pool-{i:04d}.wav"
        write_wav(AudioBuffer(noise, RATE), path)
        records.append(
            Utterance(
                id=f"pool-{i:04d}", audio_path=str(path), sample_rate_hz=RATE,
                duration_s=duration, text=" ".join(s.text for s in segments),
                lang=LanguageTag.ZH, source=Provenance.SYNTHETIC, segments=segments,
            )
        )
    return Manifest(records, name="pool")


@criterion("long-form: 1000 clips honor window, boundary, and tag invariants")
def test_long_form_invariants(tmp_path: Path):
    pool = _aligned_pool(tmp_path / "pool", 40, seed=404)
    cfg = AugmentConfig(l_max_s=30.0, seed=404)
    out = assemble_long_form(pool, cfg, 1000, out_dir=tmp_path / "clips")
    assert len(out) == 1000
    natural = truncated = 0
    for record in out:
        n_samples = len(read_wav(record.audio_path))
        assert n_samples <= 30 * RATE
        tokens = record.text.split()
        if record.continued:
            truncated += 1
            assert n_samples == 30 * RATE, "cut clips must sit exactly on the window"
            assert tokens[-1] == CONTINUATION_TAG
            tokens = tokens[:-1]
        else:
            natural += 1
        assert record.segments, "clips carry re-based token times"
        l_bound = record.segments[-1].end_s
        assert l_bound <= 30.0
        for seg in record.segments:
            assert seg.end_s <= l_bound
        assert [s.text for s in record.segments] == tokens
    assert truncated == 1000, f"a 40x(3-5 s) pool always exceeds 30 s; got {natural} natural"

    # worked boundary cases reproduce exactly
    def make_part(idx, duration, ends):
        bounds = [0.0] + ends
        segs = tuple(
            AlignedSegment(bounds[j], bounds[j + 1], f"p{idx}w{j}") for j in range(len(ends))
        )
        audio = AudioBuffer(np.zeros(int(duration * RATE)) + 0.1, RATE)
        return (
            Utterance(id=f"p{idx}", audio_path="", sample_rate_hz=RATE, duration_s=duration,
                      text=" ".join(s.text for s in segs), lang=LanguageTag.ZH,
                      source=Provenance.SYNTHETIC, segments=segs),
            audio,
        )

    parts = [make_part(0, 12.0, [4.0, 8.0, 12.0]),
             make_part(1, 11.0, [5.0, 11.0]),
             make_part(2, 10.0, [3.0, 6.0, 8.5])]
    clip = build_clip([p for p, _ in parts], [a for _, a in parts], cfg, "worked-1")
    assert clip.audio.duration_s == 30.0
    assert clip.l_bound_s == 29.0
    assert clip.utterance.continued and clip.utterance.text.endswith(CONTINUATION_TAG)

    single, audio = make_part(3, 35.0, [14.0, 28.0, 33.0])
    clip = build_clip([single], [audio], cfg, "worked-2")
    assert clip.audio.duration_s == 30.0
    assert clip.l_bound_s == 28.0
    assert clip.utterance.continued


@criterion("resegmentation: snippets in [3, 5] s bar documented cases; tokens conserved")
def test_resegmentation_invariants():
    rng = random.Random(505)
    for case in range(400):
        # contiguous tokens of 0.1-1.8 s never force a short middle snippet
        n_tokens = rng.randint(1, 60)
        bounds = [round(rng.uniform(0, 2), 3)]
        for _ in range(n_tokens):
            bounds.append(round(bounds[-1] + rng.uniform(0.1, 1.8), 3))
        segments = tuple(
            AlignedSegment(bounds[j], bounds[j + 1], f"w{j}") for j in range(n_tokens)
        )
        u = Utterance(
            id=f"r{case}", audio_path="", sample_rate_hz=RATE, duration_s=bounds[-1],
            text=" ".join(s.text for s in segments), lang=LanguageTag.ZH,
            source=Provenance.SYNTHETIC, segments=segments,
        )
        plans = plan_snippets(u, 3.0, 5.0)
        recovered = [t.text for p in plans for t in p.tokens]
        assert recovered == [s.text for s in segments], "token conservation failed"
        for p in plans[:-1]:
            assert 3.0 <= p.duration_s <= 5.0, f"case {case}: {p.duration_s}"
        assert plans[-1].duration_s <= 5.0
        for p in plans:
            assert p.source_start_s == p.tokens[0].start_s
            assert p.source_end_s == p.tokens[-1].end_s
    # oversized tokens are emitted alone and never break conservation
    for case in range(50):
        durations = [round(rng.uniform(0.2, 1.5), 3) for _ in range(6)]
        durations.insert(rng.randint(0, 6), round(rng.uniform(5.2, 9.0), 3))
        bounds = [0.0]
        for d in durations:
            bounds.append(round(bounds[-1] + d, 3))
        segments = tuple(
            AlignedSegment(bounds[j], bounds[j + 1], f"w{j}") for j in range(len(durations))
        )
        u = Utterance(
            id=f"big{case}", audio_path="", sample_rate_hz=RATE, duration_s=bounds[-1],
            text=" ".join(s.text for s in segments), lang=LanguageTag.ZH,
            source=Provenance.SYNTHETIC, segments=segments,
        )
        plans = plan_snippets(u, 3.0, 5.0)
        assert [t.text for p in plans for t in p.tokens] == [s.text for s in segments]
        for p in plans:
            if p.duration_s > 5.0:
                assert len(p.tokens) == 1, "oversized tokens must be emitted alone"


@criterion("SNR: realized within 0.1 dB of target over {-5, 0, 10, 20, 30} dB")
def test_snr_accuracy():
    targets = (-5.0, 0.0, 10.0, 20.0, 30.0)
    for target in targets:
        for trial in range(100):
            seed = int(abs(target) * 1000) + trial
            signal = white_noise(8000, RATE, seed=seed, amplitude=0.2)
            noise = white_noise(12000, RATE, seed=seed + 7, amplitude=0.5)
            mixed = mix_noise_at_snr(signal, noise, target, seed=seed)
            component = mixed.samples - signal.samples
            realized = 10 * math.log10(rms_power(signal) / float(np.mean(component**2)))
            assert abs(realized - target) <= 0.1, f"{target} dB realized {realized:.3f}"


@criterion("determinism: bundled pipeline run twice is byte-identical")
def test_pipeline_determinism(tmp_path: Path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["pipeline", "run", "--config", str(CONFIG), "--out-dir", "runs/acc"]) == 0
    first = (tmp_path / "runs/acc/final.mf").read_bytes()
    shutil.rmtree(tmp_path / "runs/acc")
    assert main(["pipeline", "run", "--config", str(CONFIG), "--out-dir", "runs/acc"]) == 0
    second = (tmp_path / "runs/acc/final.mf").read_bytes()
    assert first == second and len(first) > 0


@criterion("golden files: TextGrid segments and manifest bytes reproduce")
def test_golden_files(tmp_path: Path, data_dir: Path):
    segments = parse_textgrid(data_dir / "golden.TextGrid")
    assert segments == [AlignedSegment(0.0, 1.2, "你"), AlignedSegment(1.2, 2.0, "好")]
    golden = data_dir / "golden_manifest.mf"
    round_tripped = tmp_path / "roundtrip.mf"
    write_manifest(read_manifest(golden), round_tripped)
    assert round_tripped.read_bytes() == golden.read_bytes()
