"""Shared data model and newline-delimited manifest I/O.

Every pipeline stage consumes and produces manifests: UTF-8 files with one
record per line, each line a flat JSON object with keys exactly
``id, audio, sample_rate, duration_s, text, lang, source, speaker,
segments, per, continued``. Timestamps are stored as decimal seconds at
millisecond precision so that files diff cleanly and round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

__all__ = [
    "CONTINUATION_TAG",
    "LanguageTag",
    "Provenance",
    "AlignedSegment",
    "Utterance",
    "Manifest",
    "ManifestError",
    "quantize_ms",
    "read_manifest",
    "write_manifest",
    "validate_record",
]

# Sentinel appended to transcripts whose audio was cut before the speech ended.
CONTINUATION_TAG = "<|continued|>"

# Serialized field order; also the exact set of keys a record line may carry.
MANIFEST_KEYS = (
    "id",
    "audio",
    "sample_rate",
    "duration_s",
    "text",
    "lang",
    "source",
    "speaker",
    "segments",
    "per",
    "continued",
)

# Aligned segment ends may exceed the stated clip duration by this much;
# covers rounding of sample counts against millisecond timestamps.
SEGMENT_END_TOLERANCE_S = 0.05


class ManifestError(ValueError):
    """A manifest file or record violates the schema."""


class LanguageTag(str, Enum):
    ZH = "zh"
    EN = "en"
    MIXED = "mixed"

    @staticmethod
    def combine(tags: Sequence["LanguageTag"]) -> "LanguageTag":
        """Tag for a concatenation of utterances: mixed unless all equal."""
        distinct = set(tags)
        if len(distinct) == 1:
            return next(iter(distinct))
        return LanguageTag.MIXED


class Provenance(str, Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"
    PSEUDO_LABELED = "pseudo_labeled"


def quantize_ms(seconds: float) -> float:
    """Round a timestamp to millisecond precision for storage."""
    return round(float(seconds), 3)


@dataclass(frozen=True)
class AlignedSegment:
    """One time-aligned token: (start, end, token text)."""

    start_s: float
    end_s: float
    text: str

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def shifted(self, offset_s: float) -> "AlignedSegment":
        return AlignedSegment(
            quantize_ms(self.start_s + offset_s),
            quantize_ms(self.end_s + offset_s),
            self.text,
        )


@dataclass(frozen=True)
class Utterance:
    """One speech clip with transcript and provenance.

    The universal record flowing through every stage. Immutable: stages
    derive new records via :func:`dataclasses.replace`-style copies.
    """

    id: str
    audio_path: str
    sample_rate_hz: int
    duration_s: float
    text: str
    lang: LanguageTag
    source: Provenance
    speaker: str | None = None
    segments: tuple[AlignedSegment, ...] | None = None
    per_score: float | None = None
    continued: bool = False

    def evolved(self, **changes: object) -> "Utterance":
        return replace(self, **changes)


@dataclass
class Manifest:
    """Ordered collection of utterances with a display name."""

    records: list[Utterance] = field(default_factory=list)
    name: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.records)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def by_id(self) -> dict[str, Utterance]:
        return {r.id: r for r in self.records}


def validate_record(
    u: Utterance, *, continuation_tag: str = CONTINUATION_TAG
) -> list[str]:
    """Return all invariant violations for a record; empty means valid."""
    problems: list[str] = []
    if not u.id:
        problems.append("id: must be non-empty")
    if u.sample_rate_hz <= 0:
        problems.append("sample_rate: must be positive")
    if not u.duration_s > 0:
        problems.append("duration_s: must be positive")
    if u.source is Provenance.PSEUDO_LABELED and not u.text:
        problems.append("text: pseudo_labeled records must carry a transcript")
    if u.segments is not None:
        for i, seg in enumerate(u.segments):
            if not (0 <= seg.start_s < seg.end_s):
                problems.append(
                    f"segments[{i}]: requires 0 <= start < end, "
                    f"got ({seg.start_s}, {seg.end_s})"
                )
            if not seg.text:
                problems.append(f"segments[{i}]: token text must be non-empty")
            if i > 0 and u.segments[i - 1].end_s > seg.start_s:
                problems.append(
                    f"segments[{i}]: overlaps previous segment "
                    f"(prev end {u.segments[i - 1].end_s} > start {seg.start_s})"
                )
        if u.segments and u.segments[-1].end_s > u.duration_s + SEGMENT_END_TOLERANCE_S:
            problems.append(
                f"segments: last end {u.segments[-1].end_s} exceeds "
                f"duration_s {u.duration_s} beyond tolerance"
            )
    if u.per_score is not None and u.per_score < 0:
        problems.append("per: must be >= 0 when present")
    if u.continued and not u.text.endswith(continuation_tag):
        problems.append(
            f"continued: flag set but text does not end with {continuation_tag!r}"
        )
    return problems


def _record_to_obj(u: Utterance) -> dict[str, object]:
    segments = None
    if u.segments is not None:
        segments = [
            [quantize_ms(s.start_s), quantize_ms(s.end_s), s.text] for s in u.segments
        ]
    return {
        "id": u.id,
        "audio": u.audio_path,
        "sample_rate": u.sample_rate_hz,
        "duration_s": quantize_ms(u.duration_s),
        "text": u.text,
        "lang": u.lang.value,
        "source": u.source.value,
        "speaker": u.speaker,
        "segments": segments,
        "per": None if u.per_score is None else round(u.per_score, 6),
        "continued": u.continued,
    }


def _require(cond: bool, line_no: int, message: str) -> None:
    if not cond:
        raise ManifestError(f"line {line_no}: {message}")


def _obj_to_record(obj: object, line_no: int) -> Utterance:
    _require(isinstance(obj, dict), line_no, "record must be a JSON object")
    assert isinstance(obj, dict)
    unknown = sorted(set(obj) - set(MANIFEST_KEYS))
    _require(not unknown, line_no, f"unknown fields {unknown}")
    missing = sorted(set(MANIFEST_KEYS) - set(obj))
    _require(not missing, line_no, f"missing fields {missing}")

    _require(isinstance(obj["id"], str), line_no, "id must be a string")
    _require(isinstance(obj["audio"], str), line_no, "audio must be a string")
    _require(
        isinstance(obj["sample_rate"], int) and not isinstance(obj["sample_rate"], bool),
        line_no,
        "sample_rate must be an integer",
    )
    _require(
        isinstance(obj["duration_s"], (int, float)) and not isinstance(obj["duration_s"], bool),
        line_no,
        "duration_s must be a number",
    )
    _require(isinstance(obj["text"], str), line_no, "text must be a string")
    try:
        lang = LanguageTag(obj["lang"])
    except ValueError:
        raise ManifestError(f"line {line_no}: lang must be one of zh/en/mixed") from None
    try:
        source = Provenance(obj["source"])
    except ValueError:
        raise ManifestError(
            f"line {line_no}: source must be one of real/synthetic/pseudo_labeled"
        ) from None
    speaker = obj["speaker"]
    _require(
        speaker is None or isinstance(speaker, str), line_no, "speaker must be a string or null"
    )
    per = obj["per"]
    _require(
        per is None or (isinstance(per, (int, float)) and not isinstance(per, bool)),
        line_no,
        "per must be a number or null",
    )
    _require(isinstance(obj["continued"], bool), line_no, "continued must be a boolean")

    segments: tuple[AlignedSegment, ...] | None = None
    raw_segments = obj["segments"]
    if raw_segments is not None:
        _require(isinstance(raw_segments, list), line_no, "segments must be an array or null")
        parsed = []
        for i, triple in enumerate(raw_segments):
            ok = (
                isinstance(triple, list)
                and len(triple) == 3
                and isinstance(triple[0], (int, float))
                and isinstance(triple[1], (int, float))
                and isinstance(triple[2], str)
            )
            _require(ok, line_no, f"segments[{i}] must be [start_s, end_s, text]")
            parsed.append(AlignedSegment(float(triple[0]), float(triple[1]), triple[2]))
        segments = tuple(parsed)

    record = Utterance(
        id=obj["id"],
        audio_path=obj["audio"],
        sample_rate_hz=obj["sample_rate"],
        duration_s=float(obj["duration_s"]),
        text=obj["text"],
        lang=lang,
        source=source,
        speaker=speaker,
        segments=segments,
        per_score=None if per is None else float(per),
        continued=obj["continued"],
    )
    problems = validate_record(record)
    _require(not problems, line_no, "invalid record: " + "; ".join(problems))
    return record


def read_manifest(path: str | Path) -> Manifest:
    """Read a manifest file, rejecting the whole file on any malformed line."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    records: list[Utterance] = []
    seen_at: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped:
                raise ManifestError(f"line {line_no}: blank line in manifest")
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"line {line_no}: not valid JSON ({exc.msg})") from None
            record = _obj_to_record(obj, line_no)
            if record.id in seen_at:
                raise ManifestError(
                    f"line {line_no}: duplicate id {record.id!r} "
                    f"(first seen on line {seen_at[record.id]})"
                )
            seen_at[record.id] = line_no
            records.append(record)
    return Manifest(records=records, name=path.stem)


def write_manifest(
    m: Manifest, path: str | Path, *, continuation_tag: str = CONTINUATION_TAG
) -> None:
    """Write a manifest with stable field order; refuses invalid records."""
    path = Path(path)
    lines = []
    seen: set[str] = set()
    for i, record in enumerate(m.records):
        problems = validate_record(record, continuation_tag=continuation_tag)
        if problems:
            raise ManifestError(
                f"record {i} ({record.id!r}) violates invariants: " + "; ".join(problems)
            )
        if record.id in seen:
            raise ManifestError(f"record {i}: duplicate id {record.id!r}")
        seen.add(record.id)
        lines.append(json.dumps(_record_to_obj(record), ensure_ascii=False, separators=(",", ":")))
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")
