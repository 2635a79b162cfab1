"""Concatenative augmentation: long-form assembly, code-switching, perturbation.

Long-form clips are built by appending aligned utterances until the running
length first exceeds the inference window, cutting the audio exactly at the
window, then backtracking the transcript to the latest aligned token end
inside the window. Dropped speech is marked with a continuation tag so a
downstream consumer knows the text was truncated mid-stream, never silently
inconsistent with the audio.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .audio import (
    AudioBuffer,
    concat,
    cut,
    mix_noise_at_snr,
    read_wav,
    temporal_blur,
    white_noise,
    write_wav,
)
from .corpus import (
    CONTINUATION_TAG,
    AlignedSegment,
    LanguageTag,
    Manifest,
    Provenance,
    Utterance,
    quantize_ms,
)
from .seeding import derive_seed

__all__ = [
    "AugmentConfig",
    "LongFormClip",
    "build_clip",
    "assemble_long_form",
    "mix_code_switch",
    "perturb",
    "PerturbResult",
]

logger = logging.getLogger(__name__)

DEFAULT_L_MAX_S = 30.0


@dataclass(frozen=True)
class AugmentConfig:
    l_max_s: float = DEFAULT_L_MAX_S
    continuation_tag: str = CONTINUATION_TAG
    perturb_probability: float = 0.0
    snr_range_db: tuple[float, float] = (5.0, 20.0)
    blur_probability: float = 0.0
    blur_window_ms_range: tuple[float, float] = (1.0, 8.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.l_max_s <= 0:
            raise ValueError("l_max_s must be positive")
        if not 0 <= self.perturb_probability <= 1:
            raise ValueError("perturb_probability must be in [0, 1]")
        if not 0 <= self.blur_probability <= 1:
            raise ValueError("blur_probability must be in [0, 1]")
        if self.snr_range_db[0] > self.snr_range_db[1]:
            raise ValueError("snr_range_db must be (low, high) with low <= high")
        if self.blur_window_ms_range[0] > self.blur_window_ms_range[1]:
            raise ValueError("blur_window_ms_range must be (low, high) with low <= high")


@dataclass(frozen=True)
class LongFormClip:
    """An assembled clip plus its truncation bookkeeping."""

    utterance: Utterance
    audio: AudioBuffer
    l_bound_s: float
    dropped_tail_tokens: int


def _combined_provenance(parts: list[Utterance]) -> Provenance:
    sources = {p.source for p in parts}
    if len(sources) == 1:
        return next(iter(sources))
    return Provenance.SYNTHETIC


def build_clip(
    parts: list[Utterance],
    part_audio: list[AudioBuffer],
    cfg: AugmentConfig,
    clip_id: str,
    *,
    lang: LanguageTag | None = None,
) -> LongFormClip:
    """Assemble one clip from an ordered list of aligned utterances.

    The caller guarantees that cumulative duration of all but the last part
    stays within the window; the last part may push it over, in which case
    the audio is cut at exactly l_max_s and the transcript is truncated at
    the latest token boundary inside the window.
    """
    if not parts:
        raise ValueError("cannot build a clip from no parts")
    for u in parts:
        if not u.segments:
            raise ValueError(f"record {u.id!r} carries no aligned segments")

    merged: list[AlignedSegment] = []
    offset_samples = 0
    rate = part_audio[0].sample_rate_hz
    for u, buf in zip(parts, part_audio):
        offset_s = offset_samples / rate
        merged.extend(seg.shifted(offset_s) for seg in u.segments or ())
        offset_samples += len(buf.samples)

    full = concat(part_audio)
    exceeded = full.duration_s > cfg.l_max_s

    if not exceeded:
        kept = merged
        l_bound = min(merged[-1].end_s, cfg.l_max_s)
        audio = full
        dropped = 0
        tag_needed = False
    else:
        audio = cut(full, cfg.l_max_s)
        inside = [seg for seg in merged if seg.end_s <= cfg.l_max_s]
        if not inside:
            raise ValueError(
                f"clip {clip_id}: no token boundary at or before {cfg.l_max_s} s"
            )
        l_bound = inside[-1].end_s
        kept = [seg for seg in merged if seg.end_s <= l_bound]
        dropped = len(merged) - len(kept)
        tag_needed = True

    text = " ".join(seg.text for seg in kept)
    if tag_needed:
        text = f"{text} {cfg.continuation_tag}" if text else cfg.continuation_tag
    clip_lang = lang if lang is not None else LanguageTag.combine([p.lang for p in parts])
    speakers = {p.speaker for p in parts}
    utterance = Utterance(
        id=clip_id,
        audio_path="",
        sample_rate_hz=rate,
        duration_s=quantize_ms(audio.duration_s),
        text=text,
        lang=clip_lang,
        source=_combined_provenance(parts),
        speaker=next(iter(speakers)) if len(speakers) == 1 else None,
        segments=tuple(kept),
        continued=tag_needed,
    )
    return LongFormClip(utterance, audio, l_bound, dropped)


class _AudioCache:
    def __init__(self) -> None:
        self._cache: dict[str, AudioBuffer] = {}

    def load(self, path: str) -> AudioBuffer:
        if path not in self._cache:
            self._cache[path] = read_wav(path)
        return self._cache[path]


def _draw_clip_parts(
    pool: list[Utterance],
    cache: _AudioCache,
    cfg: AugmentConfig,
    rng: random.Random,
) -> tuple[list[Utterance], list[AudioBuffer]]:
    """Draw utterances without replacement until the window is first exceeded."""
    order = list(range(len(pool)))
    rng.shuffle(order)
    parts: list[Utterance] = []
    part_audio: list[AudioBuffer] = []
    total_samples = 0
    for idx in order:
        u = pool[idx]
        buf = cache.load(u.audio_path)
        if not parts and buf.duration_s > cfg.l_max_s:
            # a lone opener must still offer a boundary inside the window
            if not u.segments or u.segments[0].end_s > cfg.l_max_s:
                logger.warning(
                    "skipping %s: no token boundary within %.1f s", u.id, cfg.l_max_s
                )
                continue
        parts.append(u)
        part_audio.append(buf)
        total_samples += len(buf.samples)
        if total_samples / buf.sample_rate_hz > cfg.l_max_s:
            break
    return parts, part_audio


def assemble_long_form(
    pool: Manifest,
    cfg: AugmentConfig,
    count: int,
    *,
    out_dir: str | Path,
    id_prefix: str = "longform",
) -> Manifest:
    """Build `count` window-sized clips from seeded draws over the pool.

    Draws are without replacement within a clip and with replacement across
    clips; each clip derives its own generator from (seed, clip index), so
    clips are independent and the whole run is reproducible.
    """
    if len(pool) == 0:
        raise ValueError("empty pool")
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache = _AudioCache()
    records: list[Utterance] = []
    for i in range(count):
        rng = random.Random(derive_seed("longform", cfg.seed, i))
        parts, part_audio = _draw_clip_parts(pool.records, cache, cfg, rng)
        if not parts:
            raise ValueError(f"pool offers no viable parts for clip {i}")
        clip_id = f"{id_prefix}-{i:06d}"
        clip = build_clip(parts, part_audio, cfg, clip_id)
        path = out_dir / f"{clip_id}.wav"
        write_wav(clip.audio, path)
        records.append(clip.utterance.evolved(audio_path=str(path)))
    return Manifest(records, name=id_prefix)


def mix_code_switch(
    pool_a: Manifest,
    pool_b: Manifest,
    cfg: AugmentConfig,
    count: int,
    *,
    out_dir: str | Path,
    id_prefix: str = "codeswitch",
) -> Manifest:
    """Build mixed-language clips alternating draws from two pools.

    Pools must carry distinct monolingual language tags. Each clip follows
    the same window/boundary/tag rules as long-form assembly and must keep
    speech from both pools; a clip that fails that is redrawn, up to 10
    attempts.
    """
    if len(pool_a) == 0 or len(pool_b) == 0:
        raise ValueError("both pools must be non-empty")
    langs_a = {u.lang for u in pool_a}
    langs_b = {u.lang for u in pool_b}
    if len(langs_a) != 1 or len(langs_b) != 1 or langs_a == langs_b:
        raise ValueError("pools must carry distinct monolingual language tags")
    if LanguageTag.MIXED in langs_a | langs_b:
        raise ValueError("pools must be monolingual")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache = _AudioCache()
    records: list[Utterance] = []
    for i in range(count):
        clip = None
        for attempt in range(10):
            rng = random.Random(derive_seed("codeswitch", cfg.seed, i, attempt))
            clip = _try_code_switch_clip(
                pool_a.records, pool_b.records, cache, cfg, rng, f"{id_prefix}-{i:06d}"
            )
            if clip is not None:
                break
        if clip is None:
            raise ValueError(f"clip {i}: 10 attempts failed to include both languages")
        path = out_dir / f"{clip.utterance.id}.wav"
        write_wav(clip.audio, path)
        records.append(clip.utterance.evolved(audio_path=str(path)))
    return Manifest(records, name=id_prefix)


def _try_code_switch_clip(
    a: list[Utterance],
    b: list[Utterance],
    cache: _AudioCache,
    cfg: AugmentConfig,
    rng: random.Random,
    clip_id: str,
) -> LongFormClip | None:
    pools = [list(range(len(a))), list(range(len(b)))]
    rng.shuffle(pools[0])
    rng.shuffle(pools[1])
    sources = [a, b]
    side = rng.randrange(2)
    parts: list[Utterance] = []
    part_audio: list[AudioBuffer] = []
    total_samples = 0
    rate = 0
    while pools[side]:
        u = sources[side][pools[side].pop()]
        buf = cache.load(u.audio_path)
        parts.append(u)
        part_audio.append(buf)
        total_samples += len(buf.samples)
        rate = buf.sample_rate_hz
        if total_samples / rate > cfg.l_max_s:
            break
        side = 1 - side
        if not pools[side]:
            break
    if len(parts) < 2:
        return None
    clip = build_clip(parts, part_audio, cfg, clip_id, lang=LanguageTag.MIXED)
    # kept tokens are a prefix of the merged token list, so a part keeps
    # speech iff its first token index falls before the kept count
    kept_count = len(clip.utterance.segments or ())
    langs_present = set()
    start = 0
    for u in parts:
        if start < kept_count:
            langs_present.add(u.lang)
        start += len(u.segments or ())
    if len(langs_present) < 2:
        return None
    return clip


@dataclass
class PerturbResult:
    perturbed: Manifest
    rejects: Manifest = field(default_factory=Manifest)


def perturb(
    m: Manifest,
    cfg: AugmentConfig,
    noise_bank: list[AudioBuffer] | None = None,
    *,
    out_dir: str | Path,
) -> PerturbResult:
    """Seeded per-record noise injection and temporal blurring.

    Each record independently receives noise (at a seeded SNR drawn from
    snr_range_db, from the bank or generated white noise) with
    perturb_probability, and blurring with blur_probability. Text is never
    touched; applied operations are noted next to the speaker field for
    audit. Untouched records keep their original audio file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    perturbed: list[Utterance] = []
    rejects: list[Utterance] = []
    for record in m:
        rng = random.Random(derive_seed("perturb", cfg.seed, record.id))
        try:
            applied: list[str] = []
            audio: AudioBuffer | None = None
            if rng.random() < cfg.perturb_probability:
                audio = read_wav(record.audio_path)
                snr_db = rng.uniform(*cfg.snr_range_db)
                if noise_bank:
                    noise = noise_bank[rng.randrange(len(noise_bank))]
                else:
                    noise = white_noise(
                        len(audio),
                        audio.sample_rate_hz,
                        derive_seed("perturb-noise", cfg.seed, record.id),
                    )
                audio = mix_noise_at_snr(
                    audio, noise, snr_db, derive_seed("perturb-mix", cfg.seed, record.id)
                )
                applied.append(f"noise{snr_db:+.1f}dB")
            if rng.random() < cfg.blur_probability:
                if audio is None:
                    audio = read_wav(record.audio_path)
                window_ms = rng.uniform(*cfg.blur_window_ms_range)
                audio = temporal_blur(audio, window_ms)
                applied.append(f"blur{window_ms:.2f}ms")
            if not applied or audio is None:
                perturbed.append(record)
                continue
            path = out_dir / f"{record.id}.wav"
            write_wav(audio, path)
            note = "perturb:" + "+".join(applied)
            speaker = f"{record.speaker} [{note}]" if record.speaker else f"[{note}]"
            perturbed.append(record.evolved(audio_path=str(path), speaker=speaker))
        except Exception as exc:  # noqa: BLE001 - per-record isolation
            logger.warning("perturbation failed on %s: %s", record.id, exc)
            rejects.append(record)
    return PerturbResult(
        perturbed=Manifest(perturbed, name=f"{m.name}.perturbed"),
        rejects=Manifest(rejects, name=f"{m.name}.rejects"),
    )
