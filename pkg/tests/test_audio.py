from __future__ import annotations

import math
import wave
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refinery.audio import (
    AudioBuffer,
    AudioError,
    concat,
    cut,
    mix_noise_at_snr,
    read_wav,
    rms_power,
    temporal_blur,
    white_noise,
    write_wav,
)

RATE = 16000


def sine(freq: float, seconds: float, rate: int = RATE, amp: float = 1.0) -> AudioBuffer:
    t = np.arange(int(round(seconds * rate))) / rate
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), rate)


class TestWavIO:
    def test_mono_duration(self, tmp_path: Path):
        buf = sine(440, 1.0)
        path = tmp_path / "a.wav"
        write_wav(buf, path)
        back = read_wav(path)
        assert len(back) == 16000 and back.duration_s == 1.0

    def test_round_trip_error_within_quantization(self, tmp_path: Path):
        buf = sine(440, 1.0, amp=0.9)
        path = tmp_path / "a.wav"
        write_wav(buf, path)
        back = read_wav(path)
        assert float(np.max(np.abs(back.samples - buf.samples))) <= 1 / 32768

    def test_full_scale_survives(self, tmp_path: Path):
        buf = AudioBuffer(np.ones(100), RATE)
        path = tmp_path / "full.wav"
        write_wav(buf, path)
        back = read_wav(path)
        assert float(np.max(np.abs(back.samples - 1.0))) <= 1 / 32768

    def test_stereo_downmix_averages(self, tmp_path: Path):
        path = tmp_path / "st.wav"
        frames = np.zeros(200, dtype="<i2")
        frames[0::2] = 16384   # left  0.5
        frames[1::2] = -16384  # right -0.5
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(2)
            wf.setsampwidth(2)
            wf.setframerate(RATE)
            wf.writeframes(frames.tobytes())
        back = read_wav(path)
        assert np.allclose(back.samples, 0.0)

    def test_8bit_rejected(self, tmp_path: Path):
        path = tmp_path / "8bit.wav"
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(1)
            wf.setframerate(RATE)
            wf.writeframes(b"\x80" * 100)
        with pytest.raises(AudioError, match="bit depth"):
            read_wav(path)

    def test_not_a_wav(self, tmp_path: Path):
        path = tmp_path / "x.wav"
        path.write_bytes(b"definitely not RIFF data")
        with pytest.raises(AudioError):
            read_wav(path)

    def test_empty_write_refused(self, tmp_path: Path):
        with pytest.raises(AudioError):
            write_wav(AudioBuffer(np.zeros(0), RATE), tmp_path / "e.wav")


class TestConcatCut:
    def test_lengths_add(self):
        parts = [sine(100, 1.0), sine(200, 2.0), sine(300, 0.5)]
        joined = concat(parts)
        assert len(joined) == 56000 and joined.duration_s == 3.5

    def test_single_identity(self):
        buf = sine(100, 0.5)
        assert np.array_equal(concat([buf]).samples, buf.samples)

    def test_mixed_rates_rejected(self):
        with pytest.raises(AudioError, match="rates"):
            concat([sine(100, 1.0, rate=16000), sine(100, 1.0, rate=22050)])

    def test_empty_list_rejected(self):
        with pytest.raises(AudioError):
            concat([])

    def test_cut_sample_count(self):
        buf = sine(100, 33.0)
        assert len(cut(buf, 30.0)) == 480000

    def test_cut_full_duration_identity(self):
        buf = sine(100, 2.0)
        assert np.array_equal(cut(buf, 2.0).samples, buf.samples)

    def test_cut_zero_rejected(self):
        with pytest.raises(AudioError):
            cut(sine(100, 1.0), 0.0)

    def test_cut_of_concat_recovers_first_part(self):
        a, b = sine(120, 1.25), sine(250, 0.75)
        restored = cut(concat([a, b]), a.duration_s)
        assert np.array_equal(restored.samples, a.samples)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=4000), min_size=1, max_size=5))
    def test_concat_additivity_property(self, lengths):
        parts = [white_noise(n, RATE, seed=i) for i, n in enumerate(lengths)]
        assert len(concat(parts)) == sum(lengths)


class TestPower:
    def test_constant_half(self):
        assert rms_power(AudioBuffer(np.full(1000, 0.5), RATE)) == pytest.approx(0.25)

    def test_silence(self):
        assert rms_power(AudioBuffer(np.zeros(10), RATE)) == 0.0

    def test_unit_sine_whole_periods(self):
        # independent check: numerically integrate sin^2 over the same grid
        buf = sine(100, 1.0)  # 100 whole periods
        t = np.arange(16000) / RATE
        quadrature = np.trapezoid(np.sin(2 * np.pi * 100 * t) ** 2, t) / t[-1]
        assert rms_power(buf) == pytest.approx(0.5, abs=1e-6)
        assert rms_power(buf) == pytest.approx(quadrature, abs=1e-4)

    def test_empty_rejected(self):
        with pytest.raises(AudioError):
            rms_power(AudioBuffer(np.zeros(0), RATE))


class TestMixNoise:
    def test_equal_power_zero_db_gain_one(self):
        sig = sine(100, 1.0, amp=0.4)
        noise = sine(317, 1.0, amp=0.4)
        mixed = mix_noise_at_snr(sig, noise, 0.0, seed=1)
        component = mixed.samples - sig.samples
        assert np.mean(component**2) == pytest.approx(rms_power(sig), rel=1e-9)

    def test_20db_attenuates_noise_100x(self):
        sig = white_noise(16000, RATE, seed=1, amplitude=0.2)
        noise = white_noise(16000, RATE, seed=2, amplitude=0.2)
        mixed = mix_noise_at_snr(sig, noise, 20.0, seed=3)
        component = mixed.samples - sig.samples
        realized = 10 * math.log10(rms_power(sig) / float(np.mean(component**2)))
        assert realized == pytest.approx(20.0, abs=0.1)

    def test_silent_signal_rejected(self):
        with pytest.raises(AudioError, match="silent"):
            mix_noise_at_snr(
                AudioBuffer(np.zeros(100), RATE), white_noise(100, RATE, 0), 10, seed=0
            )

    def test_silent_noise_rejected(self):
        with pytest.raises(AudioError, match="silent"):
            mix_noise_at_snr(sine(100, 0.1), AudioBuffer(np.zeros(50), RATE), 10, seed=0)

    def test_deterministic_by_seed(self):
        sig = white_noise(8000, RATE, seed=4, amplitude=0.2)
        noise = white_noise(12000, RATE, seed=5, amplitude=0.2)
        a = mix_noise_at_snr(sig, noise, 5.0, seed=9)
        b = mix_noise_at_snr(sig, noise, 5.0, seed=9)
        c = mix_noise_at_snr(sig, noise, 5.0, seed=10)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_short_noise_loops(self):
        sig = white_noise(16000, RATE, seed=6, amplitude=0.2)
        noise = white_noise(3000, RATE, seed=7, amplitude=0.2)
        mixed = mix_noise_at_snr(sig, noise, 0.0, seed=8)
        assert len(mixed) == len(sig)

    @settings(max_examples=25, deadline=None)
    @given(
        st.floats(min_value=-5, max_value=30),
        st.integers(min_value=0, max_value=10_000),
    )
    def test_realized_snr_matches_target_property(self, snr_db, seed):
        sig = white_noise(4000, RATE, seed=seed, amplitude=0.1)
        noise = white_noise(6000, RATE, seed=seed + 1, amplitude=0.1)
        mixed = mix_noise_at_snr(sig, noise, snr_db, seed=seed)
        component = mixed.samples - sig.samples
        realized = 10 * math.log10(rms_power(sig) / float(np.mean(component**2)))
        assert realized == pytest.approx(snr_db, abs=0.1)


class TestTemporalBlur:
    def test_one_sample_window_is_identity(self):
        buf = AudioBuffer(np.array([1.0, -1.0] * 100), 1000)  # 1 ms = 1 sample
        out = temporal_blur(buf, 1.0)
        assert np.array_equal(out.samples, buf.samples)

    def test_constant_signal_unchanged(self):
        buf = AudioBuffer(np.full(2000, 0.3), RATE)
        for window in (1.0, 5.0, 20.0):
            assert np.allclose(temporal_blur(buf, window).samples, 0.3, atol=1e-12)

    def test_three_tap_alternating_matches_convolution_oracle(self):
        # rate 3000 and 1 ms window give a 3-tap kernel
        x = np.array([1.0, -1.0] * 64)
        buf = AudioBuffer(x, 3000)
        out = temporal_blur(buf, 1.0)
        kernel = np.hanning(5)[1:-1]
        kernel = kernel / kernel.sum()
        padded = np.pad(x, (1, 1), mode="edge")
        oracle = np.convolve(padded, kernel, mode="valid")
        assert np.allclose(out.samples, oracle, atol=1e-12)
        # alternating +/-1 under [0.25, 0.5, 0.25] cancels in the interior
        assert np.allclose(out.samples[1:-1], 0.0, atol=1e-12)

    def test_window_out_of_range(self):
        buf = AudioBuffer(np.zeros(100), RATE)
        for bad in (0.5, 25.0):
            with pytest.raises(AudioError):
                temporal_blur(buf, bad)

    def test_preserves_length(self):
        buf = white_noise(5000, RATE, seed=1)
        for window in (1.0, 7.3, 20.0):
            assert len(temporal_blur(buf, window)) == len(buf)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=9999), st.floats(min_value=1, max_value=20))
    def test_mean_preserved_and_power_bounded_property(self, seed, window_ms):
        # margins hold the edge values at zero so replicated padding adds nothing
        taps = int(round(window_ms * RATE / 1000))
        body = white_noise(8000, RATE, seed=seed).samples.copy()
        body[: taps + 1] = 0.0
        body[-(taps + 1):] = 0.0
        buf = AudioBuffer(body, RATE)
        out = temporal_blur(buf, window_ms)
        assert float(np.mean(out.samples)) == pytest.approx(float(np.mean(body)), abs=1e-6)
        assert np.mean(out.samples**2) <= np.mean(body**2) + 1e-12


class TestWhiteNoise:
    def test_deterministic(self):
        a = white_noise(1000, RATE, seed=3)
        b = white_noise(1000, RATE, seed=3)
        c = white_noise(1000, RATE, seed=4)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_amplitude_bounded(self):
        buf = white_noise(10000, RATE, seed=1, amplitude=0.25)
        assert float(np.max(np.abs(buf.samples))) <= 0.25
