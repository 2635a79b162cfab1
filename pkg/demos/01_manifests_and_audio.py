#!/usr/bin/env python3
# Records, manifests, and raw PCM handling: the two data carriers every
# stage exchanges. Run from anywhere; writes into a scratch dir under /tmp.

import tempfile
from pathlib import Path

import numpy as np

from refinery import (
    AlignedSegment,
    AudioBuffer,
    LanguageTag,
    Manifest,
    Provenance,
    Utterance,
    concat,
    cut,
    read_manifest,
    read_wav,
    rms_power,
    validate_record,
    write_manifest,
    write_wav,
)

scratch = Path(tempfile.mkdtemp(prefix="demo01-"))
print("scratch:", scratch)

# An utterance is one clip plus transcript plus bookkeeping. Records are
# immutable; stages derive new ones instead of mutating.
record = Utterance(
    id="demo-0001",
    audio_path=str(scratch / "demo-0001.wav"),
    sample_rate_hz=16000,
    duration_s=2.0,
    text="你 好",
    lang=LanguageTag.ZH,
    source=Provenance.REAL,
    speaker="narrator",
    segments=(AlignedSegment(0.0, 1.2, "你"), AlignedSegment(1.2, 2.0, "好")),
)
print("violations:", validate_record(record))  # [] means well-formed

# Manifests are JSONL, one record per line with a fixed key order, so they
# diff and round-trip byte-for-byte.
manifest_path = scratch / "demo.mf"
write_manifest(Manifest([record], name="demo"), manifest_path)
print(manifest_path.read_text(encoding="utf-8").strip())
again = read_manifest(manifest_path)
print("round-trip equal:", again.records[0] == record)

# AudioBuffer wraps mono samples in [-1, 1]; WAV I/O is 16-bit PCM.
t = np.arange(32000) / 16000
tone = AudioBuffer(0.5 * np.sin(2 * np.pi * 220 * t), 16000)
write_wav(tone, record.audio_path)
back = read_wav(record.audio_path)
print("duration:", back.duration_s, "s   power:", round(rms_power(back), 4))

# Concatenation and cutting are exact at the sample level.
double = concat([back, back])
print("concat:", double.duration_s, "s; cut back to", cut(double, 2.0).duration_s, "s")
