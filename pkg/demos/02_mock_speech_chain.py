#!/usr/bin/env python3
# The offline speech chain: a deterministic synthesizer/recognizer pair
# whose failure modes (homophone confusion, inserted content) are the exact
# problems the curation loop exists to catch.

from refinery import BackendEndpoint, align, synthesize, transcribe
from refinery.backends import MockChannelConfig, hallucinated_tokens

# A clean chain decodes exactly what was rendered.
tts = BackendEndpoint(role="tts", kind="mock", params={"seed": 7})
asr = BackendEndpoint(role="asr", kind="mock", params={"seed": 7})
audio = synthesize(tts, "今 天 去 学 校", "spk0")
print("clean decode:", transcribe(asr, audio))

# Homophone substitution models a recognizer that hears the right sounds
# but writes the wrong character: the transcript changes, the phonemes do not.
confusable = BackendEndpoint(
    role="asr",
    kind="mock",
    params={
        "seed": 7,
        "substitution_rate": 1.0,
        "homophone_table": {"好": ("号",), "做": ("作", "坐")},
    },
)
audio = synthesize(tts, "你 好", "spk0")
print("homophone decode:", transcribe(confusable, audio))

# Hallucination models a synthesizer that renders content absent from the
# prompt. The extra tokens live only in the audio; the text stays intact.
dreamy = BackendEndpoint(
    role="tts", kind="mock", params={"seed": 7, "hallucination_rate": 1.0}
)
cfg = MockChannelConfig.from_params(dreamy.params)
audio = synthesize(dreamy, "你 好", "spk0")
print("prompt:        你 好")
print("audio decodes:", transcribe(asr, audio))
print("inserted:     ", hallucinated_tokens(cfg, "你 好", "spk0"))

# The aligner assigns each token a time span tiling the clip.
aligner = BackendEndpoint(role="aligner", kind="mock", params={"seed": 7})
clean = synthesize(tts, "你 好 吗", "spk0")
for seg in align(aligner, clean, "你 好 吗"):
    print(f"  {seg.start_s:5.3f}-{seg.end_s:5.3f}  {seg.text}")
