#!/usr/bin/env python3
# Window-sized augmentation. Short snippets are appended until the clip
# first exceeds the 30 s inference window; audio is cut exactly there and
# the transcript backtracks to the last aligned token boundary inside the
# window, with a continuation tag marking the truncation. Code-switch clips
# alternate two monolingual pools under the same rules.

import random
import tempfile
from pathlib import Path

import numpy as np

from refinery import (
    AugmentConfig,
    LanguageTag,
    Manifest,
    assemble_long_form,
    mix_code_switch,
    perturb,
    read_wav,
)
from refinery.audio import AudioBuffer, write_wav
from refinery.corpus import AlignedSegment, Provenance, Utterance

scratch = Path(tempfile.mkdtemp(prefix="demo06-"))
RATE = 16000


def snippet_pool(lang: LanguageTag, count: int, seed: int) -> Manifest:
    rng = random.Random(seed)
    records = []
    for i in range(count):
        duration = round(rng.uniform(3.0, 5.0), 3)
        cuts = sorted(round(rng.uniform(0.4, duration - 0.2), 3) for _ in range(2))
        bounds = [0.0] + cuts + [duration]
        segments = tuple(
            AlignedSegment(bounds[j], bounds[j + 1], f"{lang.value}{i}t{j}")
            for j in range(3)
        )
        path = scratch / f"{lang.value}-{i:03d}.wav"
        wave = np.random.default_rng(seed + i).uniform(-0.3, 0.3, int(duration * RATE))
        write_wav(AudioBuffer(wave, RATE), path)
        records.append(
            Utterance(
                id=f"{lang.value}-{i:03d}", audio_path=str(path), sample_rate_hz=RATE,
                duration_s=duration, text=" ".join(s.text for s in segments),
                lang=lang, source=Provenance.SYNTHETIC, segments=segments,
            )
        )
    return Manifest(records, name=f"pool-{lang.value}")


zh_pool = snippet_pool(LanguageTag.ZH, 20, seed=1)
cfg = AugmentConfig(l_max_s=30.0, seed=42, perturb_probability=0.5, snr_range_db=(5, 20))

longform = assemble_long_form(zh_pool, cfg, count=3, out_dir=scratch / "longform")
for clip in longform:
    audio = read_wav(clip.audio_path)
    print(
        f"{clip.id}: {audio.duration_s:.3f} s, {len(clip.segments)} tokens kept, "
        f"truncated={clip.continued}"
    )
    print("   text tail:", " ".join(clip.text.split()[-3:]))

en_pool = snippet_pool(LanguageTag.EN, 20, seed=2)
switched = mix_code_switch(zh_pool, en_pool, cfg, count=2, out_dir=scratch / "cs")
for clip in switched:
    langs = {s.text[:2] for s in clip.segments}
    print(f"{clip.id}: lang={clip.lang.value}, pools present={sorted(langs)}")

# Perturbation happens last: seeded noise injection and temporal blurring,
# audited in the record itself, text untouched.
always = AugmentConfig(
    perturb_probability=1.0, snr_range_db=(5, 20), blur_probability=0.5, seed=42
)
result = perturb(longform, always, out_dir=scratch / "perturbed")
for clip in result.perturbed:
    print(f"{clip.id}: speaker field now {clip.speaker!r}")
