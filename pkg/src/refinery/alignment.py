"""Forced-alignment ingestion and duration-targeted resegmentation.

Parses long-format ("text") TextGrid files produced by forced aligners and
slices aligned utterances into snippets of roughly 3 to 5 seconds, cutting
only at aligned token boundaries so each snippet's text exactly covers its
audio.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .audio import AudioBuffer, read_wav, write_wav
from .corpus import AlignedSegment, Utterance, quantize_ms

__all__ = [
    "TextGridError",
    "parse_textgrid",
    "SnippetPlan",
    "plan_snippets",
    "resegment",
    "DEFAULT_MIN_SNIPPET_S",
    "DEFAULT_MAX_SNIPPET_S",
]

logger = logging.getLogger(__name__)

DEFAULT_MIN_SNIPPET_S = 3.0
DEFAULT_MAX_SNIPPET_S = 5.0

_KEY_VALUE = re.compile(r'^\s*(\w+)\s*=\s*(.*?)\s*$')
_INTERVALS_MARK = re.compile(r'^\s*intervals\s*\[\d+\]\s*:\s*$')
_POINTS_MARK = re.compile(r'^\s*points\s*\[\d+\]\s*:\s*$')


class TextGridError(ValueError):
    """Raised for files that are not parseable long-format TextGrids."""


def _decode_textgrid_bytes(raw: bytes) -> str:
    if raw.startswith(b"\xff\xfe") or raw.startswith(b"\xfe\xff"):
        return raw.decode("utf-16")
    if raw.startswith(b"\xef\xbb\xbf"):
        return raw[3:].decode("utf-8")
    return raw.decode("utf-8")


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1].replace('""', '"')
    return value


def parse_textgrid(path: str | Path) -> list[AlignedSegment]:
    """Extract the word intervals of a long-format TextGrid.

    Uses the interval tier named "words" when present, otherwise the first
    interval tier; empty-text intervals are dropped. The surviving segments
    must be ordered and non-overlapping.
    """
    path = Path(path)
    text = _decode_textgrid_bytes(path.read_bytes())
    lines = text.splitlines()

    header = "\n".join(lines[:5])
    if "ooTextFile" not in header or "TextGrid" not in header:
        raise TextGridError(f"{path}: missing ooTextFile/TextGrid header")

    tiers: list[tuple[str, list[tuple[float, float, str]]]] = []
    tier_class: str | None = None
    tier_name: str | None = None
    in_interval = False
    xmin: float | None = None
    xmax: float | None = None
    mark: str | None = None

    def flush_interval() -> None:
        nonlocal xmin, xmax, mark, in_interval
        if in_interval:
            if xmin is None or xmax is None or mark is None:
                raise TextGridError(f"{path}: interval missing xmin/xmax/text")
            tiers[-1][1].append((xmin, xmax, mark))
        xmin = xmax = mark = None
        in_interval = False

    for line in lines:
        if _INTERVALS_MARK.match(line):
            if tier_class != "IntervalTier" or not tiers:
                raise TextGridError(f"{path}: intervals outside an IntervalTier")
            flush_interval()
            in_interval = True
            continue
        if _POINTS_MARK.match(line):
            continue
        kv = _KEY_VALUE.match(line)
        if not kv:
            continue
        key, value = kv.group(1), kv.group(2)
        if key == "class":
            flush_interval()
            tier_class = _unquote(value)
            tier_name = None
            if tier_class == "IntervalTier":
                tiers.append(("", []))
        elif key == "name" and tier_class == "IntervalTier" and tier_name is None:
            tier_name = _unquote(value)
            tiers[-1] = (tier_name, tiers[-1][1])
        elif key == "xmin" and in_interval:
            xmin = float(value)
        elif key == "xmax" and in_interval:
            xmax = float(value)
        elif key == "text" and in_interval:
            mark = _unquote(value)
    flush_interval()

    if not tiers:
        raise TextGridError(f"{path}: no interval tier found")
    chosen = next((t for t in tiers if t[0] == "words"), tiers[0])

    segments = [
        AlignedSegment(quantize_ms(a), quantize_ms(b), text)
        for a, b, text in chosen[1]
        if text.strip()
    ]
    for i, seg in enumerate(segments):
        if not (0 <= seg.start_s < seg.end_s):
            raise TextGridError(f"{path}: degenerate interval {seg}")
        if i > 0 and segments[i - 1].end_s > seg.start_s:
            raise TextGridError(
                f"{path}: overlapping intervals {segments[i - 1]} and {seg}"
            )
    return segments


@dataclass(frozen=True)
class SnippetPlan:
    """One planned snippet: a token run and its source-audio span."""

    index: int
    source_start_s: float
    source_end_s: float
    tokens: tuple[AlignedSegment, ...]

    @property
    def duration_s(self) -> float:
        return quantize_ms(self.source_end_s - self.source_start_s)


def plan_snippets(
    u: Utterance,
    min_s: float = DEFAULT_MIN_SNIPPET_S,
    max_s: float = DEFAULT_MAX_SNIPPET_S,
) -> list[SnippetPlan]:
    """Greedy left-to-right split of an aligned utterance at token boundaries.

    A snippet closes at the first token boundary where its span reaches
    min_s, and closes early when taking the next token would push the span
    past max_s. The final remainder may fall short of min_s; a single token
    longer than max_s is emitted alone with a warning.
    """
    if u.segments is None or len(u.segments) == 0:
        raise ValueError(f"record {u.id!r} carries no aligned segments")
    if not 0 < min_s < max_s:
        raise ValueError(f"need 0 < min_s < max_s, got ({min_s}, {max_s})")
    plans: list[SnippetPlan] = []
    run: list[AlignedSegment] = []

    def close_run() -> None:
        nonlocal run
        if run:
            plans.append(
                SnippetPlan(len(plans), run[0].start_s, run[-1].end_s, tuple(run))
            )
            run = []

    for token in u.segments:
        if run and token.end_s - run[0].start_s > max_s:
            close_run()
        if not run and token.duration_s > max_s:
            logger.warning(
                "record %s: token %r spans %.3f s > max %.3f s; emitting alone",
                u.id,
                token.text,
                token.duration_s,
                max_s,
            )
            run = [token]
            close_run()
            continue
        run.append(token)
        if token.end_s - run[0].start_s >= min_s:
            close_run()
    close_run()
    return plans


def resegment(
    u: Utterance,
    min_s: float = DEFAULT_MIN_SNIPPET_S,
    max_s: float = DEFAULT_MAX_SNIPPET_S,
    *,
    out_dir: str | Path | None = None,
    audio: AudioBuffer | None = None,
) -> list[Utterance]:
    """Split an aligned utterance into snippet records.

    When out_dir is given, the source audio is read (or taken from the
    audio argument), each snippet's sample range is written there as
    ``<id>.s<idx>.wav``, and records point at the new files; otherwise the
    records are metadata-only with an empty audio path.
    """
    plans = plan_snippets(u, min_s, max_s)
    buffer: AudioBuffer | None = audio
    if out_dir is not None and buffer is None:
        buffer = read_wav(u.audio_path)
    records: list[Utterance] = []
    for plan in plans:
        snippet_id = f"{u.id}.s{plan.index:03d}"
        audio_path = ""
        if out_dir is not None and buffer is not None:
            lo = int(round(plan.source_start_s * buffer.sample_rate_hz))
            hi = int(round(plan.source_end_s * buffer.sample_rate_hz))
            hi = min(hi, len(buffer.samples))
            piece = AudioBuffer(buffer.samples[lo:hi], buffer.sample_rate_hz)
            path = Path(out_dir) / f"{snippet_id}.wav"
            write_wav(piece, path)
            audio_path = str(path)
        rebased = tuple(t.shifted(-plan.source_start_s) for t in plan.tokens)
        records.append(
            Utterance(
                id=snippet_id,
                audio_path=audio_path,
                sample_rate_hz=u.sample_rate_hz,
                duration_s=plan.duration_s,
                text=" ".join(t.text for t in plan.tokens),
                lang=u.lang,
                source=u.source,
                speaker=u.speaker,
                segments=rebased,
            )
        )
    return records
