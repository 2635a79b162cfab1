"""Synthetic pair generation: render a text corpus through a synthesizer.

Every text record becomes a (synthesized audio, original text) pair; the
text side is ground truth by construction, so it is never modified here.
Speakers rotate through a seeded pool to spread acoustic variation evenly.
"""

from __future__ import annotations

import logging
import random
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .audio import CANONICAL_RATE_HZ, write_wav
from .backends import BackendEndpoint, open_backend
from .batch import run_ordered
from .corpus import Manifest, Provenance, Utterance, quantize_ms
from .seeding import derive_seed

__all__ = [
    "SpeakerPool",
    "SynthesisResult",
    "sample_speaker",
    "normalize_for_synthesis",
    "synthesize_corpus",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 60


@dataclass(frozen=True)
class SpeakerPool:
    """Seeded pool of speaker ids for deterministic per-record sampling."""

    speakers: tuple[str, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.speakers:
            raise ValueError("speaker pool must be non-empty")


def sample_speaker(pool: SpeakerPool, record_index: int) -> str:
    """Deterministic speaker for a record index.

    Walks seeded per-block permutations of the pool (block = one full pass
    over the speakers), so counts stay near-uniform over any window instead
    of drifting the way independent draws would.
    """
    if record_index < 0:
        raise ValueError("record_index must be non-negative")
    size = len(pool.speakers)
    block, offset = divmod(record_index, size)
    order = list(range(size))
    random.Random(derive_seed("speaker-block", pool.seed, block)).shuffle(order)
    return pool.speakers[order[offset]]


def normalize_for_synthesis(text: str) -> str:
    """Collapse whitespace and drop control characters before synthesis."""
    cleaned = "".join(
        ch for ch in text if not unicodedata.category(ch).startswith("C") or ch in "\t\n "
    )
    return " ".join(cleaned.split())


@dataclass
class SynthesisResult:
    synthesized: Manifest
    rejects: Manifest = field(default_factory=Manifest)


def synthesize_corpus(
    texts: Manifest,
    tts: BackendEndpoint,
    pool: SpeakerPool,
    parallelism: int = 1,
    *,
    out_dir: str | Path,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> SynthesisResult:
    """Render every text record to a WAV under out_dir, named ``<id>.wav``.

    Output records gain audio path, duration, sample rate, and speaker, and
    carry synthetic provenance. Records with empty text (after
    normalization) or failed synthesis land in the rejects manifest.
    """
    if tts.role != "tts":
        raise ValueError(f"endpoint role {tts.role!r} cannot synthesize")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    indexed = list(enumerate(texts.records))
    with open_backend(tts, parallelism) as backend:

        def render(item: tuple[int, Utterance]) -> Utterance:
            index, record = item
            text = normalize_for_synthesis(record.text)
            if not text:
                raise ValueError("empty text after normalization")
            if len(text.split()) > max_tokens:
                raise ValueError(f"text exceeds {max_tokens} tokens")
            speaker = sample_speaker(pool, index)
            audio = backend.synthesize(text, speaker)
            if audio.sample_rate_hz != CANONICAL_RATE_HZ:
                raise ValueError(
                    f"synthesizer returned {audio.sample_rate_hz} Hz; "
                    f"the pipeline is {CANONICAL_RATE_HZ} Hz only (no resampler)"
                )
            path = out_dir / f"{record.id}.wav"
            write_wav(audio, path)
            return record.evolved(
                audio_path=str(path),
                sample_rate_hz=audio.sample_rate_hz,
                duration_s=quantize_ms(audio.duration_s),
                text=text,
                speaker=speaker,
                source=Provenance.SYNTHETIC,
            )

        results = run_ordered(indexed, render, parallelism)

    synthesized: list[Utterance] = []
    rejects: list[Utterance] = []
    for (_, record), rendered, error in results:
        if error is not None or rendered is None:
            logger.warning("synthesis failed on %s: %s", record.id, error)
            rejects.append(record)
        else:
            synthesized.append(rendered)
    return SynthesisResult(
        synthesized=Manifest(synthesized, name=f"{texts.name}.synth"),
        rejects=Manifest(rejects, name=f"{texts.name}.rejects"),
    )
