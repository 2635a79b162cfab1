"""Deterministic toy corpora for offline pipeline runs and benchmarks.

Text is sampled from the bundled phonemizer vocabulary, so every generated
sentence phonemizes without placeholders; speech fixtures are rendered with
a clean mock synthesizer so the recognizer side can decode them exactly.
"""

from __future__ import annotations

import random
from pathlib import Path

from .audio import write_wav
from .backends import BackendEndpoint, synthesize
from .corpus import LanguageTag, Manifest, Provenance, Utterance, quantize_ms
from .seeding import derive_seed

__all__ = [
    "ZH_CHARS",
    "EN_WORDS",
    "sample_zh_text",
    "sample_en_text",
    "text_manifest",
    "render_speech_fixtures",
]

# Drawn from the bundled pinyin table; all phonemize to two symbols.
ZH_CHARS = (
    "你 好 我 们 今 天 去 学 校 看 书 说 话 吃 饭 喝 水 朋 友 老 师 早 上 晚 月 亮 星 火 车 电 话 时 间 工 作 生 活 高 兴 开 心 东 西 南 北 前 后 左 右 大 小 多 少 长 短 快 慢 新 旧 远 近".split()
)
# Every word has a lexicon entry, so English fixtures avoid letter fallback.
EN_WORDS = (
    "the a we go to school today music machine learning model data speech "
    "language computer world hello good new old big small long short time day "
    "people work play read book water food house home friend family morning "
    "evening open close start stop run walk fast slow very really"
).split()

_PLACEHOLDER_DURATION_S = 1.0


def sample_zh_text(rng: random.Random, min_tokens: int = 4, max_tokens: int = 8) -> str:
    n = rng.randint(min_tokens, max_tokens)
    return " ".join(rng.choice(ZH_CHARS) for _ in range(n))


def sample_en_text(rng: random.Random, min_tokens: int = 3, max_tokens: int = 6) -> str:
    n = rng.randint(min_tokens, max_tokens)
    return " ".join(rng.choice(EN_WORDS) for _ in range(n))


def text_manifest(
    texts: list[str], lang: LanguageTag, name: str, id_prefix: str = "text"
) -> Manifest:
    """Wrap bare texts as records awaiting synthesis.

    Text-only records carry a 1 s placeholder duration and an empty audio
    path; synthesis replaces both.
    """
    records = [
        Utterance(
            id=f"{id_prefix}-{i:05d}",
            audio_path="",
            sample_rate_hz=16_000,
            duration_s=_PLACEHOLDER_DURATION_S,
            text=text,
            lang=lang,
            source=Provenance.REAL,
        )
        for i, text in enumerate(texts)
    ]
    return Manifest(records, name=name)


def render_speech_fixtures(
    out_dir: str | Path,
    count: int,
    seed: int,
    *,
    lang: LanguageTag = LanguageTag.ZH,
    tokens_per_second: float = 2.0,
    id_prefix: str = "speech",
) -> Manifest:
    """Render `count` clean clips as stand-ins for collected raw speech.

    The records keep empty transcripts: downstream pseudo-labeling is what
    fills them in.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tts = mock_endpoint("tts", seed, tokens_per_second=tokens_per_second)
    records = []
    for i in range(count):
        rng = random.Random(derive_seed("speech-fixture", seed, i))
        if lang is LanguageTag.ZH:
            text = sample_zh_text(rng, 6, 12)
        else:
            text = sample_en_text(rng, 4, 8)
        speaker = f"fixture{rng.randrange(4)}"
        audio = synthesize(tts, text, speaker)
        record_id = f"{id_prefix}-{i:05d}"
        path = out_dir / f"{record_id}.wav"
        write_wav(audio, path)
        records.append(
            Utterance(
                id=record_id,
                audio_path=str(path),
                sample_rate_hz=audio.sample_rate_hz,
                duration_s=quantize_ms(audio.duration_s),
                text="",
                lang=lang,
                source=Provenance.REAL,
                speaker=speaker,
            )
        )
    return Manifest(records, name=id_prefix)


def mock_endpoint(role: str, seed: int, **params: object) -> BackendEndpoint:
    """Convenience constructor for seeded mock endpoints."""
    merged: dict[str, object] = {"seed": seed}
    merged.update(params)
    return BackendEndpoint(role=role, kind="mock", params=merged)
