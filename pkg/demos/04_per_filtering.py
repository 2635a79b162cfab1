#!/usr/bin/env python3
# Phoneme-level quality filtering. Comparing phonemicized text discounts
# homophone spelling differences (not a real error) while catching inserted
# content (a real one); pairs at or above the threshold are dropped.

import random
import tempfile
from pathlib import Path

from refinery import FilterConfig, LanguageTag, SpeakerPool, filter_pairs, per, phonemize
from refinery import synthesize_corpus
from refinery.fixtures import mock_endpoint, sample_zh_text, text_manifest

# Same sounds, different characters: distance zero.
print("phonemes of 好:", phonemize("好").phonemes)
print("phonemes of 号:", phonemize("号").phonemes)
print("per(好, 号) =", per("好", "号"))

# English goes through a word lexicon with per-letter fallback.
print("phonemes of cat:", phonemize("cat").phonemes)
print("per('see you', 'sea you') =", per("see you", "sea you"))

# Inserted content drives the rate up fast.
print("per with insertions =", round(per("你 好", "你 好 serendipity"), 3))

# End to end: synthesize 40 pairs, a third of them corrupted, then filter.
scratch = Path(tempfile.mkdtemp(prefix="demo04-"))
rng = random.Random(5)
texts = [sample_zh_text(rng, 4, 6) for _ in range(40)]
tts = mock_endpoint("tts", seed=5, hallucination_rate=0.33)
synth = synthesize_corpus(
    text_manifest(texts, LanguageTag.ZH, "texts"),
    tts,
    SpeakerPool(("a", "b"), seed=5),
    out_dir=scratch / "wav",
)
outcome = filter_pairs(
    synth.synthesized,
    FilterConfig(alpha=0.6, validator=mock_endpoint("validator_asr", seed=5)),
)
print(f"kept {len(outcome.kept)}, removed {len(outcome.removed)} of {len(synth.synthesized)}")
print("sample scores:", [r.per_score for r in outcome.removed][:4])
