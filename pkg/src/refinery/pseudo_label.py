"""Pseudo-labeling: transcribe an unpaired-speech manifest with a recognizer."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .audio import read_wav
from .backends import BackendEndpoint, open_backend
from .batch import run_ordered
from .corpus import Manifest, Provenance, Utterance

__all__ = ["PseudoLabelResult", "pseudo_label_corpus"]

logger = logging.getLogger(__name__)

DEFAULT_MAX_FAILURE_RATE = 0.5


@dataclass
class PseudoLabelResult:
    labeled: Manifest
    rejects: Manifest = field(default_factory=Manifest)


def pseudo_label_corpus(
    speech: Manifest,
    asr: BackendEndpoint,
    parallelism: int = 1,
    *,
    max_failure_rate: float = DEFAULT_MAX_FAILURE_RATE,
) -> PseudoLabelResult:
    """Replace each record's text with the recognizer's transcript.

    Output keeps the input's ids and order; provenance becomes
    pseudo_labeled. Records the recognizer fails on go to the rejects
    manifest, never silently dropped. The run aborts when the failure rate
    exceeds max_failure_rate.
    """
    if asr.role not in ("asr", "validator_asr"):
        raise ValueError(f"endpoint role {asr.role!r} cannot pseudo-label")

    with open_backend(asr, parallelism) as backend:

        def label(record: Utterance) -> str:
            audio = read_wav(record.audio_path)
            return backend.transcribe(audio, record.lang)

        results = run_ordered(speech.records, label, parallelism)

    labeled: list[Utterance] = []
    rejects: list[Utterance] = []
    for record, text, error in results:
        if error is not None or not text:
            logger.warning("pseudo-labeling failed on %s: %s", record.id, error or "empty")
            rejects.append(record)
        else:
            labeled.append(record.evolved(text=text, source=Provenance.PSEUDO_LABELED))
    if speech.records and len(rejects) / len(speech.records) > max_failure_rate:
        raise RuntimeError(
            f"pseudo-labeling failed on {len(rejects)}/{len(speech.records)} records, "
            f"over the {max_failure_rate:.0%} abort threshold"
        )
    return PseudoLabelResult(
        labeled=Manifest(labeled, name=f"{speech.name}.pseudo"),
        rejects=Manifest(rejects, name=f"{speech.name}.rejects"),
    )
