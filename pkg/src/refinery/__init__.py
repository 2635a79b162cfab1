"""Self-refining speech-data curation toolkit."""

from .audio import (
    AudioBuffer,
    concat,
    cut,
    mix_noise_at_snr,
    read_wav,
    rms_power,
    temporal_blur,
    white_noise,
    write_wav,
)
from .alignment import parse_textgrid, plan_snippets, resegment
from .augment import AugmentConfig, assemble_long_form, build_clip, mix_code_switch, perturb
from .backends import BackendEndpoint, MockChannelConfig, align, synthesize, transcribe
from .corpus import (
    AlignedSegment,
    LanguageTag,
    Manifest,
    Provenance,
    Utterance,
    read_manifest,
    validate_record,
    write_manifest,
)
from .evaluate import EvalReport, evaluate_manifest, mer, normalize_text, tokenize_mixed
from .filtering import FilterConfig, PhonemeSequence, edit_distance, filter_pairs, per, phonemize
from .mixer import compose_mix
from .pseudo_label import pseudo_label_corpus
from .synthesis import SpeakerPool, sample_speaker, synthesize_corpus

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "AlignedSegment",
    "AugmentConfig",
    "BackendEndpoint",
    "EvalReport",
    "FilterConfig",
    "LanguageTag",
    "Manifest",
    "MockChannelConfig",
    "PhonemeSequence",
    "Provenance",
    "SpeakerPool",
    "Utterance",
    "align",
    "assemble_long_form",
    "build_clip",
    "compose_mix",
    "concat",
    "cut",
    "edit_distance",
    "evaluate_manifest",
    "filter_pairs",
    "mer",
    "mix_code_switch",
    "mix_noise_at_snr",
    "normalize_text",
    "parse_textgrid",
    "per",
    "perturb",
    "phonemize",
    "plan_snippets",
    "pseudo_label_corpus",
    "read_manifest",
    "read_wav",
    "resegment",
    "rms_power",
    "sample_speaker",
    "synthesize",
    "synthesize_corpus",
    "temporal_blur",
    "tokenize_mixed",
    "transcribe",
    "validate_record",
    "white_noise",
    "write_manifest",
    "write_wav",
]
