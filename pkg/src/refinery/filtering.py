"""Hallucination filtering for synthesized pairs.

A lightweight validator recognizer transcribes each synthesized clip; the
transcript is compared against the source text at the phoneme level, which
discounts orthographic variation (homophones) that does not indicate a bad
pair. Pairs whose phoneme error rate reaches the threshold are removed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .backends import BackendEndpoint, open_backend
from .batch import run_ordered
from .corpus import LanguageTag, Manifest, Utterance
from .audio import read_wav

__all__ = [
    "PhonemeSequence",
    "FilterConfig",
    "Phonemizer",
    "default_phonemizer",
    "load_table",
    "load_homophone_groups",
    "phonemize",
    "edit_distance",
    "per",
    "filter_pairs",
]

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.6


@dataclass(frozen=True)
class PhonemeSequence:
    """Ordered phoneme symbols; symbols are non-empty and whitespace-free."""

    phonemes: tuple[str, ...]

    def __post_init__(self) -> None:
        for p in self.phonemes:
            if not p or any(c.isspace() for c in p):
                raise ValueError(f"bad phoneme symbol {p!r}")

    def __len__(self) -> int:
        return len(self.phonemes)


@dataclass(frozen=True)
class FilterConfig:
    alpha: float = DEFAULT_ALPHA
    validator: BackendEndpoint | None = None
    phonemizer: str = "builtin"
    table_path: str | None = None

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.phonemizer not in ("builtin", "external_table"):
            raise ValueError(f"unknown phonemizer kind {self.phonemizer!r}")
        if self.phonemizer == "external_table" and not self.table_path:
            raise ValueError("external_table phonemizer requires table_path")


def load_table(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Load a grapheme<TAB>phoneme-list table."""
    table: dict[str, tuple[str, ...]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise ValueError(f"{path}:{line_no}: expected 'grapheme<TAB>phonemes'")
            table[parts[0]] = tuple(parts[1].split())
    return table


def _bundled(name: str) -> Path:
    return Path(str(resources.files("refinery.data").joinpath(name)))


def load_homophone_groups() -> list[tuple[str, ...]]:
    """Bundled groups of tokens that must phonemize identically."""
    groups = []
    with _bundled("homophones.tsv").open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                groups.append(tuple(line.split("\t")))
    return groups


def _is_han(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF  # CJK Unified Ideographs
        or 0x3400 <= cp <= 0x4DBF  # Extension A
        or 0xF900 <= cp <= 0xFAFF  # Compatibility Ideographs
    )


def _is_latin(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


class Phonemizer:
    """Table-driven grapheme-to-phoneme converter with script detection.

    Han characters map through a character table (toneless pinyin split into
    initial and final); Latin words map through a word lexicon with
    per-letter fallback; digits map to themselves. Unknown Han characters
    fall back to a codepoint placeholder and are counted.
    """

    def __init__(
        self,
        han_table: dict[str, tuple[str, ...]],
        word_table: dict[str, tuple[str, ...]],
    ) -> None:
        self.han_table = han_table
        self.word_table = word_table
        self.unknown_han_count = 0

    @classmethod
    def builtin(cls) -> "Phonemizer":
        return cls(load_table(_bundled("han_pinyin.tsv")), load_table(_bundled("en_lexicon.tsv")))

    @classmethod
    def from_external_table(cls, path: str | Path) -> "Phonemizer":
        """Build from a single user table; single-Han entries key by character."""
        han: dict[str, tuple[str, ...]] = {}
        words: dict[str, tuple[str, ...]] = {}
        for grapheme, symbols in load_table(path).items():
            if len(grapheme) == 1 and _is_han(grapheme):
                han[grapheme] = symbols
            else:
                words[grapheme.lower()] = symbols
        return cls(han, words)

    def phonemize(self, text: str, lang: LanguageTag = LanguageTag.MIXED) -> PhonemeSequence:
        del lang  # script detection handles monolingual and mixed text alike
        symbols: list[str] = []
        for token in text.split():
            i = 0
            while i < len(token):
                ch = token[i]
                if _is_han(ch):
                    entry = self.han_table.get(ch)
                    if entry is None:
                        self.unknown_han_count += 1
                        logger.debug("no pinyin entry for %r; using placeholder", ch)
                        entry = (f"U+{ord(ch):04X}",)
                    symbols.extend(entry)
                    i += 1
                elif _is_latin(ch):
                    j = i
                    while j < len(token) and _is_latin(token[j]):
                        j += 1
                    word = token[i:j].lower()
                    entry = self.word_table.get(word)
                    symbols.extend(entry if entry is not None else [c.upper() for c in word])
                    i = j
                elif ch.isdigit():
                    symbols.append(ch)
                    i += 1
                else:
                    i += 1  # punctuation and symbols carry no phonemes
        return PhonemeSequence(tuple(symbols))


_DEFAULT_PHONEMIZER: Phonemizer | None = None


def default_phonemizer() -> Phonemizer:
    global _DEFAULT_PHONEMIZER
    if _DEFAULT_PHONEMIZER is None:
        _DEFAULT_PHONEMIZER = Phonemizer.builtin()
    return _DEFAULT_PHONEMIZER


def phonemize(text: str, lang: LanguageTag = LanguageTag.MIXED) -> PhonemeSequence:
    """Phonemize with the bundled tables."""
    return default_phonemizer().phonemize(text, lang)


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    """Minimal substitutions + insertions + deletions turning ref into hyp."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    previous = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        current = [i] + [0] * len(hyp)
        for j in range(1, len(hyp) + 1):
            change = previous[j - 1] + (ref[i - 1] != hyp[j - 1])
            current[j] = min(previous[j] + 1, current[j - 1] + 1, change)
        previous = current
    return previous[len(hyp)]


def per(
    ref_text: str,
    hyp_text: str,
    lang: LanguageTag = LanguageTag.MIXED,
    phonemizer: Phonemizer | None = None,
) -> float:
    """Phoneme error rate of hyp against ref; may exceed 1."""
    pz = phonemizer or default_phonemizer()
    ref = pz.phonemize(ref_text, lang)
    if len(ref) == 0:
        raise ValueError(f"reference {ref_text!r} phonemizes to an empty sequence")
    hyp = pz.phonemize(hyp_text, lang)
    return edit_distance(ref.phonemes, hyp.phonemes) / len(ref)


@dataclass
class FilterOutcome:
    """Partition of the input: kept, removed on threshold, failed to score."""

    kept: Manifest
    removed: Manifest
    rejects: Manifest = field(default_factory=Manifest)


def filter_pairs(
    synth: Manifest,
    cfg: FilterConfig,
    parallelism: int = 1,
) -> FilterOutcome:
    """Score every pair with the validator and split at the threshold.

    A record is kept when its phoneme error rate is strictly below alpha and
    removed when it reaches alpha. Records the validator cannot score go to
    the rejects manifest, never to kept.
    """
    if cfg.validator is None:
        raise ValueError("FilterConfig.validator is required")
    if cfg.validator.role not in ("asr", "validator_asr"):
        raise ValueError(f"validator role {cfg.validator.role!r} cannot transcribe")
    if cfg.phonemizer == "external_table":
        pz = Phonemizer.from_external_table(cfg.table_path)
    else:
        pz = default_phonemizer()

    kept: list[Utterance] = []
    removed: list[Utterance] = []
    rejects: list[Utterance] = []
    with open_backend(cfg.validator, parallelism) as backend:

        def score(record: Utterance) -> float:
            audio = read_wav(record.audio_path)
            hyp = backend.transcribe(audio, record.lang)
            return per(record.text, hyp, record.lang, pz)

        results = run_ordered(synth.records, score, parallelism)

    for record, result, error in results:
        if error is not None:
            logger.warning("validator failed on %s: %s", record.id, error)
            rejects.append(record)
            continue
        delta = round(result, 6)
        scored = record.evolved(per_score=delta)
        if delta < cfg.alpha:
            kept.append(scored)
        else:
            removed.append(scored)
    return FilterOutcome(
        kept=Manifest(kept, name=f"{synth.name}.kept"),
        removed=Manifest(removed, name=f"{synth.name}.removed"),
        rejects=Manifest(rejects, name=f"{synth.name}.rejects"),
    )
