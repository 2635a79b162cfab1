#!/usr/bin/env python3
# Data collection, both directions: transcribe unpaired speech into
# (audio, pseudo-label) pairs, and render unpaired text into
# (synthetic audio, text) pairs with rotating speakers.

import tempfile
from pathlib import Path

from refinery import LanguageTag, SpeakerPool, pseudo_label_corpus, synthesize_corpus
from refinery.fixtures import mock_endpoint, render_speech_fixtures, text_manifest

scratch = Path(tempfile.mkdtemp(prefix="demo03-"))

# Pretend these five clips arrived unlabeled from the wild.
speech = render_speech_fixtures(scratch / "raw", count=5, seed=11)
print("collected:", [(u.id, u.text or "<no transcript>") for u in speech][:2], "...")

result = pseudo_label_corpus(speech, mock_endpoint("asr", seed=11), parallelism=2)
for u in result.labeled:
    print(f"  {u.id}: {u.text}   [{u.source.value}]")
print("rejects:", len(result.rejects))

# The reverse direction: a text corpus becomes synthetic speech pairs.
texts = text_manifest(
    ["今 天 很 好", "我 们 去 看 书", "学 校 在 东 边"], LanguageTag.ZH, "texts"
)
pool = SpeakerPool(("alto", "bass", "tenor"), seed=11)
synth = synthesize_corpus(
    texts, mock_endpoint("tts", seed=11), pool, parallelism=2, out_dir=scratch / "synth"
)
for u in synth.synthesized:
    print(f"  {u.id}: {u.duration_s} s by {u.speaker} -> {Path(u.audio_path).name}")
