"""Mono PCM primitives: WAV I/O, concatenation, power math, perturbations.

All operations are value-in/value-out on immutable buffers; nothing here
touches shared state, so callers may fan out over records freely. The
canonical format is 16 kHz mono 16-bit PCM; other rates are carried by
:class:`AudioBuffer` but WAV files must be 16-bit integer PCM.
"""

from __future__ import annotations

import logging
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .seeding import derive_seed

__all__ = [
    "CANONICAL_RATE_HZ",
    "AudioBuffer",
    "AudioError",
    "read_wav",
    "write_wav",
    "concat",
    "cut",
    "rms_power",
    "noise_gain",
    "align_noise",
    "mix_noise_at_snr",
    "temporal_blur",
    "white_noise",
]

logger = logging.getLogger(__name__)

CANONICAL_RATE_HZ = 16_000

_INT16_FULL_SCALE = 32768.0


class AudioError(ValueError):
    """Raised for malformed audio inputs or out-of-range parameters."""


@dataclass(frozen=True)
class AudioBuffer:
    """Mono samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate_hz <= 0:
            raise AudioError("sample rate must be positive")
        if samples.ndim != 1:
            raise AudioError("buffer must be mono (1-D)")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a 16-bit PCM WAV file; stereo is downmixed by channel averaging."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            sample_width = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except (wave.Error, EOFError) as exc:
        raise AudioError(f"not a readable PCM WAV file: {path} ({exc})") from None
    if sample_width != 2:
        raise AudioError(f"unsupported bit depth {8 * sample_width} in {path}; need 16-bit PCM")
    if n_frames == 0:
        raise AudioError(f"zero-length audio: {path}")
    if n_channels not in (1, 2):
        raise AudioError(f"unsupported channel count {n_channels} in {path}")
    ints = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    if n_channels == 2:
        ints = ints.reshape(-1, 2).mean(axis=1)
    return AudioBuffer(ints / _INT16_FULL_SCALE, rate)


def write_wav(a: AudioBuffer, path: str | Path) -> None:
    """Write 16-bit mono PCM; round-trips within 1/32768 per sample."""
    if len(a) == 0:
        raise AudioError("refusing to write an empty buffer")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ints = np.clip(np.rint(a.samples * _INT16_FULL_SCALE), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(a.sample_rate_hz)
        wf.writeframes(ints.tobytes())


def concat(parts: Sequence[AudioBuffer]) -> AudioBuffer:
    """Join buffers end to end with no gaps or crossfade."""
    if not parts:
        raise AudioError("cannot concatenate an empty list")
    rates = {p.sample_rate_hz for p in parts}
    if len(rates) > 1:
        raise AudioError(f"mixed sample rates: {sorted(rates)}")
    return AudioBuffer(np.concatenate([p.samples for p in parts]), parts[0].sample_rate_hz)


def cut(a: AudioBuffer, end_s: float) -> AudioBuffer:
    """Keep the prefix up to end_s; sample count is round(end_s * rate)."""
    if not 0 < end_s <= a.duration_s:
        raise AudioError(f"cut point {end_s} s outside (0, {a.duration_s:.6f}] s")
    n = int(round(end_s * a.sample_rate_hz))
    return AudioBuffer(a.samples[:n], a.sample_rate_hz)


def rms_power(a: AudioBuffer) -> float:
    """Mean of squared samples."""
    if len(a) == 0:
        raise AudioError("power of an empty buffer is undefined")
    return float(np.mean(a.samples**2))


def noise_gain(p_signal: float, p_noise: float, snr_db: float) -> float:
    """Gain scaling a noise of power p_noise to sit snr_db below p_signal."""
    return float(np.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0))))


def align_noise(noise: AudioBuffer, n_samples: int, seed: int) -> AudioBuffer:
    """Loop or slice noise to n_samples, starting at a seeded offset."""
    rng = np.random.default_rng(derive_seed("noise-offset", seed))
    m = len(noise.samples)
    if m >= n_samples:
        offset = int(rng.integers(0, m - n_samples + 1))
        out = noise.samples[offset : offset + n_samples]
    else:
        offset = int(rng.integers(0, m))
        idx = (offset + np.arange(n_samples)) % m
        out = noise.samples[idx]
    return AudioBuffer(out, noise.sample_rate_hz)


def mix_noise_at_snr(
    signal: AudioBuffer, noise: AudioBuffer, snr_db: float, seed: int
) -> AudioBuffer:
    """Add noise at the target SNR, then hard-clip to [-1, 1].

    The gain is computed against the power of the aligned noise segment that
    is actually added, so the realized SNR of the additive component matches
    the target exactly (pre-clipping). Clipping incidence is logged.
    """
    if signal.sample_rate_hz != noise.sample_rate_hz:
        raise AudioError("signal and noise must share a sample rate")
    p_signal = rms_power(signal)
    if p_signal == 0.0:
        raise AudioError("cannot set an SNR against a silent signal")
    aligned = align_noise(noise, len(signal), seed)
    p_noise = rms_power(aligned)
    if p_noise == 0.0:
        raise AudioError("noise segment is silent")
    g = noise_gain(p_signal, p_noise, snr_db)
    mixed = signal.samples + g * aligned.samples
    clipped = int(np.count_nonzero((mixed > 1.0) | (mixed < -1.0)))
    if clipped:
        logger.warning("mix_noise_at_snr clipped %d/%d samples", clipped, len(mixed))
    return AudioBuffer(np.clip(mixed, -1.0, 1.0), signal.sample_rate_hz)


def _smoothing_kernel(n_taps: int) -> np.ndarray:
    # Interior of a Hann window: strictly positive taps, normalized to sum 1,
    # so constants pass through unchanged and power never increases.
    window = np.hanning(n_taps + 2)[1:-1]
    return window / window.sum()


def temporal_blur(a: AudioBuffer, window_ms: float) -> AudioBuffer:
    """Convolve with a normalized Hann window of the given width, edge-padded."""
    if not 1.0 <= window_ms <= 20.0:
        raise AudioError(f"blur window {window_ms} ms outside [1, 20] ms")
    n_taps = max(1, int(round(window_ms * a.sample_rate_hz / 1000.0)))
    if n_taps == 1 or len(a) == 0:
        return a
    kernel = _smoothing_kernel(n_taps)
    left = (n_taps - 1) // 2
    right = n_taps - 1 - left
    padded = np.pad(a.samples, (left, right), mode="edge")
    return AudioBuffer(np.convolve(padded, kernel, mode="valid"), a.sample_rate_hz)


def white_noise(
    n_samples: int, sample_rate_hz: int, seed: int, amplitude: float = 0.5
) -> AudioBuffer:
    """Deterministic uniform white noise in [-amplitude, amplitude]."""
    if n_samples <= 0:
        raise AudioError("noise length must be positive")
    if not 0 < amplitude <= 1:
        raise AudioError("amplitude must be in (0, 1]")
    rng = np.random.default_rng(derive_seed("white-noise", seed))
    return AudioBuffer(amplitude * rng.uniform(-1.0, 1.0, n_samples), sample_rate_hz)
