#!/usr/bin/env python3
# From aligner output to training-sized snippets. Clips are cut only at
# aligned token boundaries, targeting 3-5 s, so audio and text always agree.

import tempfile
import textwrap
from pathlib import Path

from refinery import parse_textgrid, plan_snippets, resegment
from refinery.corpus import AlignedSegment, LanguageTag, Provenance, Utterance

scratch = Path(tempfile.mkdtemp(prefix="demo05-"))

# Aligners commonly hand back Praat TextGrid files; the words tier drives
# everything downstream.
grid = scratch / "sample.TextGrid"
grid.write_text(
    textwrap.dedent(
        '''\
        File type = "ooTextFile"
        Object class = "TextGrid"

        xmin = 0
        xmax = 3
        size = 1
        item []:
            item [1]:
                class = "IntervalTier"
                name = "words"
                xmin = 0
                xmax = 3
                intervals: size = 3
                intervals [1]:
                    xmin = 0
                    xmax = 0.9
                    text = "you"
                intervals [2]:
                    xmin = 0.9
                    xmax = 1.4
                    text = ""
                intervals [3]:
                    xmin = 1.4
                    xmax = 3
                    text = "good"
        '''
    ),
    encoding="utf-8",
)
for seg in parse_textgrid(grid):
    print(f"  {seg.start_s:5.2f}-{seg.end_s:5.2f}  {seg.text}")

# A 12 s utterance with a token boundary every second packs greedily into
# four snippets of three seconds each.
segments = tuple(AlignedSegment(float(i), float(i + 1), f"w{i}") for i in range(12))
utterance = Utterance(
    id="long-utt",
    audio_path="",
    sample_rate_hz=16000,
    duration_s=12.0,
    text=" ".join(s.text for s in segments),
    lang=LanguageTag.ZH,
    source=Provenance.SYNTHETIC,
    segments=segments,
)
for plan in plan_snippets(utterance, 3.0, 5.0):
    tokens = " ".join(t.text for t in plan.tokens)
    print(f"  snippet {plan.index}: {plan.source_start_s}-{plan.source_end_s} s [{tokens}]")

# resegment() materializes those plans as records (and cuts WAVs when
# handed an out_dir); token times are re-based to each snippet.
for rec in resegment(utterance, 3.0, 5.0):
    print(f"  {rec.id}: {rec.duration_s} s, first token at {rec.segments[0].start_s}")
