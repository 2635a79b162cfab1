"""Pipeline configuration: INI-style file with one section per stage.

Unset keys fall back to the documented defaults (filter alpha 0.6, snippet
range 3-5 s, window 30 s). Validation is collect-all: a bad file reports
every problem at once, not just the first.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

from .augment import AugmentConfig
from .backends import BackendEndpoint
from .filtering import DEFAULT_ALPHA

__all__ = ["ConfigError", "PipelineConfig", "load_config", "config_hash"]

_BACKEND_SECTIONS = ("asr", "validator", "tts", "aligner")
_ROLE_BY_SECTION = {
    "asr": "asr",
    "validator": "validator_asr",
    "tts": "tts",
    "aligner": "aligner",
}

_KNOWN_KEYS: dict[str, set[str]] = {
    "pipeline": {"run_dir", "seed", "parallelism", "speech_manifest", "text_file", "speakers"},
    "fixtures": {"generate", "zh_clips", "zh_texts", "en_texts"},
    "filter": {"alpha", "phonemizer", "table_path"},
    "resegment": {"min_s", "max_s"},
    "augment": {
        "l_max_s",
        "continuation_tag",
        "longform_count",
        "codeswitch_count",
        "perturb_probability",
        "snr_db_low",
        "snr_db_high",
        "blur_probability",
        "blur_ms_low",
        "blur_ms_high",
    },
    "mix": {"total"},
}
_BACKEND_KEYS = {
    "kind",
    "command",
    "timeout_s",
    "seed",
    "substitution_rate",
    "hallucination_rate",
    "tokens_per_second",
    "homophone_table",
    "hallucination_lexicon",
}
_MOCK_ONLY_KEYS = {
    "substitution_rate",
    "hallucination_rate",
    "tokens_per_second",
    "homophone_table",
    "hallucination_lexicon",
}


class ConfigError(ValueError):
    """Invalid configuration; message lists every detected problem."""


@dataclass
class FixtureConfig:
    generate: bool = False
    zh_clips: int = 10
    zh_texts: int = 36
    en_texts: int = 12


def _default_parallelism() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass
class PipelineConfig:
    run_dir: str = "runs/pipeline"
    seed: int = 0
    parallelism: int = field(default_factory=_default_parallelism)
    speech_manifest: str | None = None
    text_file: str | None = None
    speakers: tuple[str, ...] = tuple(f"spk{i:02d}" for i in range(8))
    backends: dict[str, BackendEndpoint] = field(default_factory=dict)
    alpha: float = DEFAULT_ALPHA
    phonemizer: str = "builtin"
    table_path: str | None = None
    min_snippet_s: float = 3.0
    max_snippet_s: float = 5.0
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    longform_count: int = 6
    codeswitch_count: int = 4
    mix_total: int = 48
    fixtures: FixtureConfig = field(default_factory=FixtureConfig)

    def __post_init__(self) -> None:
        if not self.backends:
            self.backends = _default_backends(self.seed)

    def endpoint(self, section: str) -> BackendEndpoint:
        return self.backends[section]


def _default_backends(seed: int) -> dict[str, BackendEndpoint]:
    return {
        section: BackendEndpoint(role=_ROLE_BY_SECTION[section], kind="mock", params={"seed": seed})
        for section in _BACKEND_SECTIONS
    }


def _parse_backend(
    section: str, raw: dict[str, str], seed: int, errors: list[str]
) -> BackendEndpoint | None:
    unknown = sorted(set(raw) - _BACKEND_KEYS)
    if unknown:
        errors.append(f"[{section}] unknown keys: {', '.join(unknown)}")
    kind = raw.get("kind", "mock")
    if kind == "external":
        kind = "external_process"
    if kind not in ("mock", "external_process"):
        errors.append(f"[{section}] kind must be mock or external, got {kind!r}")
        return None
    command = raw.get("command")
    if kind == "mock" and command:
        errors.append(
            f"[{section}] defines mock kind and an external command; pick exactly one"
        )
        return None
    if kind == "external_process":
        if not command:
            errors.append(f"[{section}] external kind needs a command")
            return None
        mock_leftovers = sorted(set(raw) & _MOCK_ONLY_KEYS)
        if mock_leftovers:
            errors.append(
                f"[{section}] external kind cannot carry mock keys: {', '.join(mock_leftovers)}"
            )
            return None
    params: dict[str, object] = {"seed": seed}
    for key in _MOCK_ONLY_KEYS:
        if key in raw:
            params[key] = raw[key]
    if "seed" in raw:
        params["seed"] = raw["seed"]
    timeout = float(raw.get("timeout_s", 120.0))
    try:
        return BackendEndpoint(
            role=_ROLE_BY_SECTION[section],
            kind=kind,
            command=command,
            params=params,
            timeout_s=timeout,
        )
    except ValueError as exc:
        errors.append(f"[{section}] {exc}")
        return None


def _get_float(
    raw: dict[str, str], section: str, key: str, default: float, errors: list[str]
) -> float:
    if key not in raw:
        return default
    try:
        return float(raw[key])
    except ValueError:
        errors.append(f"[{section}] {key} must be a number, got {raw[key]!r}")
        return default


def _get_int(
    raw: dict[str, str], section: str, key: str, default: int, errors: list[str]
) -> int:
    if key not in raw:
        return default
    try:
        return int(raw[key])
    except ValueError:
        errors.append(f"[{section}] {key} must be an integer, got {raw[key]!r}")
        return default


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    errors: list[str] = []
    known_sections = set(_KNOWN_KEYS) | set(_BACKEND_SECTIONS)
    for section in parser.sections():
        if section not in known_sections:
            errors.append(f"unknown section [{section}]")

    def section_dict(name: str) -> dict[str, str]:
        return dict(parser[name]) if parser.has_section(name) else {}

    for section, allowed in _KNOWN_KEYS.items():
        raw = section_dict(section)
        unknown = sorted(set(raw) - allowed)
        if unknown:
            errors.append(f"[{section}] unknown keys: {', '.join(unknown)}")

    pipeline_raw = section_dict("pipeline")
    seed = _get_int(pipeline_raw, "pipeline", "seed", 0, errors)
    parallelism = _get_int(pipeline_raw, "pipeline", "parallelism", _default_parallelism(), errors)
    if parallelism < 1:
        errors.append("[pipeline] parallelism must be >= 1")
    speakers_raw = pipeline_raw.get("speakers", "")
    speakers = tuple(s.strip() for s in speakers_raw.split(",") if s.strip()) or tuple(
        f"spk{i:02d}" for i in range(8)
    )

    backends = _default_backends(seed)
    for section in _BACKEND_SECTIONS:
        if parser.has_section(section):
            endpoint = _parse_backend(section, section_dict(section), seed, errors)
            if endpoint is not None:
                backends[section] = endpoint

    filter_raw = section_dict("filter")
    alpha = _get_float(filter_raw, "filter", "alpha", DEFAULT_ALPHA, errors)
    if not 0 < alpha <= 1:
        errors.append(f"[filter] alpha must be in (0, 1], got {alpha}")
    phonemizer = filter_raw.get("phonemizer", "builtin")
    if phonemizer not in ("builtin", "external_table"):
        errors.append(f"[filter] phonemizer must be builtin or external_table, got {phonemizer!r}")
    table_path = filter_raw.get("table_path")
    if phonemizer == "external_table" and not table_path:
        errors.append("[filter] external_table phonemizer needs table_path")

    reseg_raw = section_dict("resegment")
    min_s = _get_float(reseg_raw, "resegment", "min_s", 3.0, errors)
    max_s = _get_float(reseg_raw, "resegment", "max_s", 5.0, errors)
    if not 0 < min_s < max_s:
        errors.append(f"[resegment] needs 0 < min_s < max_s, got ({min_s}, {max_s})")

    augment_raw = section_dict("augment")
    l_max_s = _get_float(augment_raw, "augment", "l_max_s", 30.0, errors)
    if l_max_s <= 0:
        errors.append(f"[augment] l_max_s must be positive, got {l_max_s}")
    perturb_p = _get_float(augment_raw, "augment", "perturb_probability", 0.0, errors)
    blur_p = _get_float(augment_raw, "augment", "blur_probability", 0.0, errors)
    for key, value in (("perturb_probability", perturb_p), ("blur_probability", blur_p)):
        if not 0 <= value <= 1:
            errors.append(f"[augment] {key} must be in [0, 1], got {value}")
    snr_low = _get_float(augment_raw, "augment", "snr_db_low", 5.0, errors)
    snr_high = _get_float(augment_raw, "augment", "snr_db_high", 20.0, errors)
    if snr_low > snr_high:
        errors.append(f"[augment] snr_db_low {snr_low} exceeds snr_db_high {snr_high}")
    blur_low = _get_float(augment_raw, "augment", "blur_ms_low", 1.0, errors)
    blur_high = _get_float(augment_raw, "augment", "blur_ms_high", 8.0, errors)
    if blur_low > blur_high:
        errors.append(f"[augment] blur_ms_low {blur_low} exceeds blur_ms_high {blur_high}")
    longform_count = _get_int(augment_raw, "augment", "longform_count", 6, errors)
    codeswitch_count = _get_int(augment_raw, "augment", "codeswitch_count", 4, errors)
    if longform_count < 0 or codeswitch_count < 0:
        errors.append("[augment] counts must be >= 0")

    mix_raw = section_dict("mix")
    mix_total = _get_int(mix_raw, "mix", "total", 48, errors)
    if mix_total < 1:
        errors.append(f"[mix] total must be >= 1, got {mix_total}")

    fixtures_raw = section_dict("fixtures")
    fixtures = FixtureConfig(
        generate=fixtures_raw.get("generate", "false").lower() in ("1", "true", "yes"),
        zh_clips=_get_int(fixtures_raw, "fixtures", "zh_clips", 10, errors),
        zh_texts=_get_int(fixtures_raw, "fixtures", "zh_texts", 36, errors),
        en_texts=_get_int(fixtures_raw, "fixtures", "en_texts", 12, errors),
    )

    if errors:
        raise ConfigError("invalid config:\n  " + "\n  ".join(errors))

    augment_cfg = AugmentConfig(
        l_max_s=l_max_s,
        continuation_tag=augment_raw.get("continuation_tag", AugmentConfig.continuation_tag),
        perturb_probability=perturb_p,
        snr_range_db=(snr_low, snr_high),
        blur_probability=blur_p,
        blur_window_ms_range=(blur_low, blur_high),
        seed=seed,
    )
    return PipelineConfig(
        run_dir=pipeline_raw.get("run_dir", "runs/pipeline"),
        seed=seed,
        parallelism=parallelism,
        speech_manifest=pipeline_raw.get("speech_manifest"),
        text_file=pipeline_raw.get("text_file"),
        speakers=speakers,
        backends=backends,
        alpha=alpha,
        phonemizer=phonemizer,
        table_path=table_path,
        min_snippet_s=min_s,
        max_snippet_s=max_s,
        augment=augment_cfg,
        longform_count=longform_count,
        codeswitch_count=codeswitch_count,
        mix_total=mix_total,
        fixtures=fixtures,
    )


def config_hash(path: str | Path | None) -> str:
    """Short content hash of the config file driving a run."""
    if path is None:
        return "none"
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
