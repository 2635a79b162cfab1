"""Uniform contract for recognizer, synthesizer, and aligner workers.

Two kinds of endpoint share one operation surface:

* ``mock`` — a deterministic in-process toy speech chain. The synthesizer
  renders each whitespace token as a short FSK-modulated tone block (nibble
  values of the token's UTF-8 bytes on a fixed frequency grid, plus a
  speaker-specific low-frequency carrier), and the recognizer decodes those
  blocks exactly. Config knobs inject homophone substitutions on the
  recognizer side and extra inserted tokens on the synthesizer side, so the
  failure modes the curation loop must catch exist offline.

* ``external_process`` — a worker subprocess speaking newline-delimited
  JSON on stdin/stdout. One request is in flight per worker; parallelism
  comes from a pool of workers. See the protocol notes below.

Wire protocol (UTF-8, one JSON object per line). On startup the worker
emits a handshake line ``{"ok": true, "result": {"ready": true}}``. Requests
are ``{"id", "op": "transcribe"|"synthesize"|"align", "audio"?, "text"?,
"speaker"?, "lang_hint"?}``; responses are ``{"id", "ok": true, "result":
{"text"} | {"audio"} | {"segments": [[start_s, end_s, token], ...]}}`` or
``{"id", "ok": false, "error"}``. Audio crosses the boundary as WAV paths;
workers write synthesized WAVs under the directory named by the
``REFINERY_WORK_DIR`` environment variable.
"""

from __future__ import annotations

import json
import logging
import os
import random
import select
import shlex
import subprocess
import tempfile
import threading
import uuid
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from queue import Queue
from typing import Mapping

import numpy as np

from .audio import AudioBuffer, CANONICAL_RATE_HZ, read_wav, write_wav
from .corpus import AlignedSegment, LanguageTag, quantize_ms
from .seeding import derive_seed

__all__ = [
    "BackendEndpoint",
    "BackendError",
    "ProtocolError",
    "MockChannelConfig",
    "transcribe",
    "synthesize",
    "align",
    "open_backend",
    "hallucinated_tokens",
    "WORK_DIR_ENV",
]

logger = logging.getLogger(__name__)

WORK_DIR_ENV = "REFINERY_WORK_DIR"

ROLES = ("asr", "validator_asr", "tts", "aligner")
KINDS = ("mock", "external_process")

DEFAULT_TIMEOUT_S = 120.0

DEFAULT_HALLUCINATION_LEXICON = (
    "monstrous", "quixotic", "labyrinth", "kaleidoscope", "serendipity",
    "juxtaposition", "phantasmagoria", "circumlocution",
)


class BackendError(RuntimeError):
    """A backend call failed for one request."""


class ProtocolError(BackendError):
    """An external worker broke the wire protocol."""


@dataclass(frozen=True)
class BackendEndpoint:
    """Descriptor of a recognizer/synthesizer/aligner worker."""

    role: str
    kind: str = "mock"
    command: str | None = None
    params: Mapping[str, object] = field(default_factory=dict)
    timeout_s: float = DEFAULT_TIMEOUT_S

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "external_process" and not self.command:
            raise ValueError("external_process endpoints need a command")


@dataclass(frozen=True)
class MockChannelConfig:
    """Noise model for the toy speech chain."""

    substitution_rate: float = 0.0
    homophone_table: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    hallucination_rate: float = 0.0
    hallucination_lexicon: tuple[str, ...] = DEFAULT_HALLUCINATION_LEXICON
    seed: int = 0
    tokens_per_second: float = 2.0
    base_frequency_by_speaker: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.substitution_rate <= 1:
            raise ValueError("substitution_rate must be in [0, 1]")
        if not 0 <= self.hallucination_rate <= 1:
            raise ValueError("hallucination_rate must be in [0, 1]")
        if self.tokens_per_second <= 0:
            raise ValueError("tokens_per_second must be positive")

    @classmethod
    def from_params(cls, params: Mapping[str, object]) -> "MockChannelConfig":
        kwargs: dict[str, object] = {}
        for key in (
            "substitution_rate",
            "hallucination_rate",
            "seed",
            "tokens_per_second",
        ):
            if key in params:
                value = params[key]
                kwargs[key] = int(value) if key == "seed" else float(value)  # type: ignore[arg-type]
        table = params.get("homophone_table")
        if isinstance(table, str):
            kwargs["homophone_table"] = load_homophone_table(table)
        elif isinstance(table, Mapping):
            kwargs["homophone_table"] = {k: tuple(v) for k, v in table.items()}
        lexicon = params.get("hallucination_lexicon")
        if isinstance(lexicon, str):
            kwargs["hallucination_lexicon"] = tuple(lexicon.split(","))
        elif isinstance(lexicon, (list, tuple)):
            kwargs["hallucination_lexicon"] = tuple(lexicon)
        bases = params.get("base_frequency_by_speaker")
        if isinstance(bases, Mapping):
            kwargs["base_frequency_by_speaker"] = {k: float(v) for k, v in bases.items()}
        return cls(**kwargs)  # type: ignore[arg-type]


def load_homophone_table(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Load token -> same-sounding alternatives from a TSV of groups."""
    table: dict[str, tuple[str, ...]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            group = [t for t in line.rstrip("\n").split("\t") if t]
            for token in group:
                others = tuple(t for t in group if t != token)
                if others:
                    table[token] = others
    return table


# --- mock waveform codec -------------------------------------------------
#
# Each token occupies a fixed slot of round(rate / tokens_per_second)
# samples. The first sixth of the slot holds two header segments carrying
# the token's UTF-8 byte count as two nibbles; the remainder holds two
# segments per byte (high then low nibble). Every segment is a pure tone
# from a 16-value frequency grid, so decoding is an argmax over complex
# correlations and is exact on clean audio.

_GRID_BASE_HZ = 600.0
_GRID_STEP_HZ = 120.0
_DATA_AMPLITUDE = 0.6
_SPEAKER_AMPLITUDE = 0.1
_MAX_TOKEN_BYTES = 32
_HEADER_FRACTION = 6  # header region = slot / 6


def _grid_hz(value: int) -> float:
    return _GRID_BASE_HZ + (value + 1) * _GRID_STEP_HZ


def _slot_samples(cfg: MockChannelConfig, rate: int) -> int:
    return int(round(rate / cfg.tokens_per_second))


def _speaker_base_hz(cfg: MockChannelConfig, speaker: str | None) -> float:
    if speaker and speaker in cfg.base_frequency_by_speaker:
        return float(cfg.base_frequency_by_speaker[speaker])
    return 80.0 + derive_seed("speaker-base", speaker or "") % 160


def _tone(freq_hz: float, n: int, rate: int) -> np.ndarray:
    k = np.arange(n)
    return np.sin(2.0 * np.pi * freq_hz * k / rate)


@lru_cache(maxsize=4096)
def _segment_tone(freq_hz: float, n: int, rate: int) -> np.ndarray:
    # segment tones are short (a fraction of one token slot) and repeat
    # constantly, so memoizing them is cheap and saves most of the render cost
    tone = _tone(freq_hz, n, rate)
    tone.setflags(write=False)
    return tone


@lru_cache(maxsize=512)
def _detector_basis(n: int, rate: int) -> np.ndarray:
    k = np.arange(n)
    freqs = np.array([_grid_hz(v) for v in range(16)])
    basis = np.exp(-2j * np.pi * np.outer(freqs, k) / rate)
    basis.setflags(write=False)
    return basis


def _render_token(token: str, slot: int, rate: int) -> np.ndarray:
    data = token.encode("utf-8")
    if not 1 <= len(data) <= _MAX_TOKEN_BYTES:
        raise BackendError(
            f"token {token!r} is {len(data)} bytes; mock channel carries 1..{_MAX_TOKEN_BYTES}"
        )
    header_region = slot // _HEADER_FRACTION
    header_seg = header_region // 2
    data_region = slot - header_region
    data_seg = data_region // (2 * len(data))
    if header_seg < 8 or data_seg < 8:
        raise BackendError(
            f"slot of {slot} samples too short for {len(data)}-byte token; "
            "lower tokens_per_second"
        )
    out = np.zeros(slot)
    n = len(data)
    out[0:header_seg] = _segment_tone(_grid_hz(n >> 4), header_seg, rate)
    out[header_seg : 2 * header_seg] = _segment_tone(_grid_hz(n & 15), header_seg, rate)
    pos = header_region
    for byte in data:
        for nibble in (byte >> 4, byte & 15):
            out[pos : pos + data_seg] = _segment_tone(_grid_hz(nibble), data_seg, rate)
            pos += data_seg
    return _DATA_AMPLITUDE * out


def _segment_value(segment: np.ndarray, rate: int) -> int:
    scores = np.abs(_detector_basis(len(segment), rate) @ segment)
    best = int(np.argmax(scores))
    # a silent segment correlates with nothing; report it as a zero nibble
    if scores[best] < 1e-6 * max(len(segment), 1):
        return 0
    return best


def _decode_token(slot_samples: np.ndarray, rate: int) -> str | None:
    slot = len(slot_samples)
    header_region = slot // _HEADER_FRACTION
    header_seg = header_region // 2
    if header_seg < 8:
        return None
    hi = _segment_value(slot_samples[0:header_seg], rate)
    lo = _segment_value(slot_samples[header_seg : 2 * header_seg], rate)
    n = (hi << 4) | lo
    if not 1 <= n <= _MAX_TOKEN_BYTES:
        return None
    data_region = slot - header_region
    data_seg = data_region // (2 * n)
    if data_seg < 8:
        return None
    values = []
    pos = header_region
    for _ in range(2 * n):
        values.append(_segment_value(slot_samples[pos : pos + data_seg], rate))
        pos += data_seg
    raw = bytes((values[2 * i] << 4) | values[2 * i + 1] for i in range(n))
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return None


def hallucinated_tokens(
    cfg: MockChannelConfig, text: str, speaker: str | None
) -> list[str]:
    """Extra tokens the mock synthesizer will insert for this input.

    Pure function of (config seed, text, speaker); empty for most inputs
    unless hallucination_rate forces insertions. Exposed so callers can
    recover ground truth about which pairs were corrupted.
    """
    rng = random.Random(derive_seed("hallucinate", cfg.seed, text, speaker or ""))
    if rng.random() >= cfg.hallucination_rate or not cfg.hallucination_lexicon:
        return []
    count = rng.randint(1, 3)
    return [rng.choice(cfg.hallucination_lexicon) for _ in range(count)]


def _mock_synthesize(cfg: MockChannelConfig, text: str, speaker: str | None) -> AudioBuffer:
    tokens = text.split()
    if not tokens:
        raise BackendError("cannot synthesize empty text")
    extra = hallucinated_tokens(cfg, text, speaker)
    if extra:
        rng = random.Random(derive_seed("hallucinate-pos", cfg.seed, text, speaker or ""))
        pos = rng.randint(0, len(tokens))
        tokens = tokens[:pos] + extra + tokens[pos:]
    rate = CANONICAL_RATE_HZ
    slot = _slot_samples(cfg, rate)
    rendered = np.concatenate([_render_token(t, slot, rate) for t in tokens])
    carrier = _SPEAKER_AMPLITUDE * _tone(_speaker_base_hz(cfg, speaker), len(rendered), rate)
    return AudioBuffer(np.clip(rendered + carrier, -1.0, 1.0), rate)


def _mock_transcribe(cfg: MockChannelConfig, audio: AudioBuffer) -> str:
    if len(audio) == 0:
        raise BackendError("cannot transcribe empty audio")
    slot = _slot_samples(cfg, audio.sample_rate_hz)
    n_slots = max(1, int(round(len(audio) / slot)))
    tokens: list[str] = []
    for i in range(n_slots):
        piece = audio.samples[i * slot : (i + 1) * slot]
        if len(piece) < slot // 2:
            continue
        token = _decode_token(piece, audio.sample_rate_hz)
        if token is not None:
            tokens.append(token)
    if cfg.substitution_rate > 0 and cfg.homophone_table:
        rng = random.Random(derive_seed("substitute", cfg.seed, " ".join(tokens)))
        swapped = []
        for token in tokens:
            options = cfg.homophone_table.get(token)
            if options and rng.random() < cfg.substitution_rate:
                swapped.append(options[rng.randrange(len(options))])
            else:
                swapped.append(token)
        tokens = swapped
    return " ".join(tokens)


def _mock_align(cfg: MockChannelConfig, audio: AudioBuffer, text: str) -> list[AlignedSegment]:
    tokens = text.split()
    if not tokens:
        raise BackendError("cannot align empty text")
    if len(audio) == 0:
        raise BackendError("cannot align empty audio")
    duration = audio.duration_s
    bounds = [quantize_ms(i * duration / len(tokens)) for i in range(len(tokens) + 1)]
    segments = [
        AlignedSegment(bounds[i], bounds[i + 1], tokens[i]) for i in range(len(tokens))
    ]
    for seg in segments:
        if seg.start_s >= seg.end_s:
            raise BackendError(
                f"audio of {duration:.3f} s too short to align {len(tokens)} tokens"
            )
    return segments


# --- external worker client ----------------------------------------------


def _work_dir() -> Path:
    configured = os.environ.get(WORK_DIR_ENV)
    if configured:
        path = Path(configured)
    else:
        path = Path(tempfile.gettempdir()) / "refinery-work"
    path.mkdir(parents=True, exist_ok=True)
    return path


class _Worker:
    """One external process; exactly one request in flight at a time."""

    def __init__(self, command: str, timeout_s: float) -> None:
        self.command = command
        self.timeout_s = timeout_s
        env = dict(os.environ)
        env.setdefault(WORK_DIR_ENV, str(_work_dir()))
        self.proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            encoding="utf-8",
            env=env,
        )
        handshake = self._read_response()
        if not handshake.get("ok"):
            raise BackendError(f"worker handshake failed: {handshake.get('error')}")

    def _read_response(self) -> dict:
        stdout = self.proc.stdout
        assert stdout is not None
        ready, _, _ = select.select([stdout], [], [], self.timeout_s)
        if not ready:
            raise ProtocolError(f"worker timed out after {self.timeout_s} s")
        line = stdout.readline()
        if not line:
            raise ProtocolError("worker closed its output stream")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(f"malformed worker response line: {line!r}") from None
        if not isinstance(obj, dict) or "ok" not in obj:
            raise ProtocolError(f"worker response missing 'ok': {line!r}")
        return obj

    def request(self, payload: dict) -> dict:
        stdin = self.proc.stdin
        assert stdin is not None
        if self.proc.poll() is not None:
            raise ProtocolError("worker process has exited")
        stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
        stdin.flush()
        response = self._read_response()
        if response.get("id") != payload["id"]:
            raise ProtocolError(
                f"response id {response.get('id')!r} does not match request {payload['id']!r}"
            )
        if not response.get("ok"):
            raise BackendError(f"worker error: {response.get('error', 'unspecified')}")
        result = response.get("result")
        if not isinstance(result, dict):
            raise ProtocolError("worker response carries no result object")
        return result

    def alive(self) -> bool:
        return self.proc.poll() is None

    def close(self) -> None:
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
            self.proc.wait(timeout=5)
        except Exception:  # noqa: BLE001 - best-effort shutdown
            self.proc.kill()


class ExternalBackend:
    """Pool of worker processes serving one endpoint role."""

    def __init__(self, endpoint: BackendEndpoint, parallelism: int = 1) -> None:
        self.endpoint = endpoint
        self._pool: Queue[_Worker] = Queue()
        self._lock = threading.Lock()
        size = max(1, parallelism)
        for _ in range(size):
            self._pool.put(_Worker(endpoint.command or "", endpoint.timeout_s))

    def _call(self, payload: dict) -> dict:
        worker = self._pool.get()
        try:
            try:
                return worker.request(payload)
            except ProtocolError as first:
                # One malformed or lost response fails only this request id;
                # retry once on a fresh worker before giving up.
                logger.warning("retrying request %s: %s", payload.get("id"), first)
                if not worker.alive():
                    worker.close()
                    worker = _Worker(self.endpoint.command or "", self.endpoint.timeout_s)
                return worker.request(payload)
        finally:
            self._pool.put(worker)

    def transcribe(self, audio: AudioBuffer, lang_hint: LanguageTag | None = None) -> str:
        wav = _work_dir() / f"req-{uuid.uuid4().hex}.wav"
        write_wav(audio, wav)
        payload = {"id": f"tr-{uuid.uuid4().hex[:12]}", "op": "transcribe", "audio": str(wav)}
        if lang_hint is not None:
            payload["lang_hint"] = lang_hint.value
        try:
            result = self._call(payload)
        finally:
            wav.unlink(missing_ok=True)
        text = result.get("text")
        if not isinstance(text, str):
            raise ProtocolError("transcribe result lacks a text field")
        return text

    def synthesize(self, text: str, speaker: str | None = None) -> AudioBuffer:
        payload = {
            "id": f"syn-{uuid.uuid4().hex[:12]}",
            "op": "synthesize",
            "text": text,
            "speaker": speaker or "",
        }
        result = self._call(payload)
        audio_path = result.get("audio")
        if not isinstance(audio_path, str):
            raise ProtocolError("synthesize result lacks an audio path")
        return read_wav(audio_path)

    def align(self, audio: AudioBuffer, text: str) -> list[AlignedSegment]:
        wav = _work_dir() / f"req-{uuid.uuid4().hex}.wav"
        write_wav(audio, wav)
        payload = {
            "id": f"al-{uuid.uuid4().hex[:12]}",
            "op": "align",
            "audio": str(wav),
            "text": text,
        }
        try:
            result = self._call(payload)
        finally:
            wav.unlink(missing_ok=True)
        raw = result.get("segments")
        if not isinstance(raw, list):
            raise ProtocolError("align result lacks a segments array")
        segments = []
        for triple in raw:
            if not (isinstance(triple, list) and len(triple) == 3):
                raise ProtocolError(f"bad segment triple {triple!r}")
            segments.append(AlignedSegment(float(triple[0]), float(triple[1]), str(triple[2])))
        _check_segments(segments)
        return segments

    def close(self) -> None:
        while not self._pool.empty():
            self._pool.get_nowait().close()

    def __enter__(self) -> "ExternalBackend":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


class MockBackend:
    """Stateless in-process backend; fully parallel."""

    def __init__(self, endpoint: BackendEndpoint) -> None:
        self.endpoint = endpoint
        self.cfg = MockChannelConfig.from_params(endpoint.params)

    def transcribe(self, audio: AudioBuffer, lang_hint: LanguageTag | None = None) -> str:
        del lang_hint  # the toy channel decodes script-agnostically
        return _mock_transcribe(self.cfg, audio)

    def synthesize(self, text: str, speaker: str | None = None) -> AudioBuffer:
        return _mock_synthesize(self.cfg, text, speaker)

    def align(self, audio: AudioBuffer, text: str) -> list[AlignedSegment]:
        return _mock_align(self.cfg, audio, text)

    def close(self) -> None:
        pass

    def __enter__(self) -> "MockBackend":
        return self

    def __exit__(self, *exc: object) -> None:
        pass


def _check_segments(segments: list[AlignedSegment]) -> None:
    for i, seg in enumerate(segments):
        if not (0 <= seg.start_s < seg.end_s):
            raise BackendError(f"aligner produced invalid segment {seg}")
        if i > 0 and segments[i - 1].end_s > seg.start_s:
            raise BackendError(
                f"aligner produced overlapping segments {segments[i - 1]} and {seg}"
            )


def open_backend(ep: BackendEndpoint, parallelism: int = 1):
    """Open a callable backend for an endpoint; context-manage it."""
    if ep.kind == "mock":
        return MockBackend(ep)
    return ExternalBackend(ep, parallelism)


def _require_role(ep: BackendEndpoint, allowed: tuple[str, ...]) -> None:
    if ep.role not in allowed:
        raise BackendError(f"endpoint role {ep.role!r} cannot serve this operation")


def transcribe(
    ep: BackendEndpoint, audio: AudioBuffer, lang_hint: LanguageTag | None = None
) -> str:
    """Transcribe one buffer. Recognizer and validator roles only."""
    _require_role(ep, ("asr", "validator_asr"))
    with open_backend(ep) as backend:
        return backend.transcribe(audio, lang_hint)


def synthesize(ep: BackendEndpoint, text: str, speaker: str | None = None) -> AudioBuffer:
    """Render text to audio. Synthesizer role only."""
    _require_role(ep, ("tts",))
    if not text.split():
        raise BackendError("cannot synthesize empty text")
    with open_backend(ep) as backend:
        return backend.synthesize(text, speaker)


def align(ep: BackendEndpoint, audio: AudioBuffer, text: str) -> list[AlignedSegment]:
    """Time-align each whitespace token of text against audio."""
    _require_role(ep, ("aligner",))
    with open_backend(ep) as backend:
        return backend.align(audio, text)
