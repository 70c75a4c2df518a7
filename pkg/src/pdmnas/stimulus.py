"""Stimulus generation: waveform synthesis, WAV ingestion, and the
sigma-delta modulator that turns a waveform into a 1-bit PDM stream.
"""
from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field

import numpy as np

from ._kernels import sigma_delta_kernel
from .events import ClockConfig
from .exceptions import FormatError


@dataclass(frozen=True)
class Waveform:
    """Real-valued samples in [-1, +1] at a uniform rate (clipped on build)."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        arr = np.clip(np.asarray(self.samples, np.float64), -1.0, 1.0)
        object.__setattr__(self, "samples", arr)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class PdmStream:
    """1-bit pulses, one per PDM clock period; bit i is sampled at core
    cycle start_cycle + i * pdm_divisor."""

    bits: np.ndarray
    clock: ClockConfig = field(default_factory=ClockConfig)
    start_cycle: int = 0

    def __post_init__(self):
        bits = np.asarray(self.bits, np.uint8)
        if bits.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if bits.size and bits.max() > 1:
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)
        if self.start_cycle < 0:
            raise ValueError("start_cycle must be non-negative")

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def duration_cycles(self) -> int:
        return self.start_cycle + len(self) * self.clock.pdm_divisor


def synth_sine(freq_hz: float, amplitude: float, duration_s: float,
               sample_rate_hz: float) -> Waveform:
    """amplitude * sin(2 pi f t) sampled at sample_rate_hz."""
    if not 0 < freq_hz < sample_rate_hz / 2:
        raise ValueError(
            f"freq_hz must be in (0, Nyquist={sample_rate_hz / 2}), got {freq_hz}")
    if not 0 <= amplitude <= 1:
        raise ValueError("amplitude must be in [0, 1]")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    n = int(round(duration_s * sample_rate_hz))
    i = np.arange(n, dtype=np.float64)
    samples = amplitude * np.sin(2.0 * math.pi * freq_hz * i / sample_rate_hz)
    return Waveform(samples, sample_rate_hz)


def load_wav(source) -> list[Waveform]:
    """Read a 16-bit PCM RIFF/WAVE file; one Waveform per channel,
    samples scaled by 1/32768."""
    try:
        with wave.open(source, "rb") as wf:
            n_channels = wf.getnchannels()
            sampwidth = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            if sampwidth != 2:
                raise FormatError(
                    f"unsupported encoding: PCM-{8 * sampwidth} "
                    f"(only 16-bit integer PCM is supported)")
            if n_channels not in (1, 2):
                raise FormatError(
                    f"unsupported channel count {n_channels} (need 1 or 2)")
            raw = wf.readframes(n_frames)
    except wave.Error as e:
        raise FormatError(f"unsupported encoding: {e}") from e
    data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    frames = data.reshape(-1, n_channels)
    return [Waveform(frames[:, c], float(rate)) for c in range(n_channels)]


def resample_zoh(w: Waveform, target_rate_hz: float) -> Waveform:
    """Zero-order-hold upsampling: output at time t takes the latest input
    sample at or before t."""
    if target_rate_hz < w.sample_rate_hz:
        raise ValueError(
            f"resample_zoh only upsamples: {target_rate_hz} < {w.sample_rate_hz}")
    if target_rate_hz == w.sample_rate_hz:
        return w
    n_out = int(round(len(w) * target_rate_hz / w.sample_rate_hz))
    j = np.arange(n_out, dtype=np.float64)
    idx = np.floor(j * (w.sample_rate_hz / target_rate_hz)).astype(np.int64)
    idx = np.minimum(idx, len(w) - 1)
    return Waveform(w.samples[idx], target_rate_hz)


def sigma_delta_modulate(w: Waveform, clock: ClockConfig) -> PdmStream:
    """Second-order error-feedback sigma-delta modulation to 1-bit PDM.

    Quantizer ties (u == 0) emit bit 1. The mean of the +-1 bit mapping over
    a long window tracks the mean of the input. Deterministic: identical
    input always yields the identical bit sequence.
    """
    if w.sample_rate_hz != clock.pdm_clock_hz:
        raise ValueError(
            f"waveform rate {w.sample_rate_hz} Hz must equal the PDM clock "
            f"{clock.pdm_clock_hz} Hz (resample first)")
    bits = sigma_delta_kernel(w.samples)
    return PdmStream(bits, clock, 0)
