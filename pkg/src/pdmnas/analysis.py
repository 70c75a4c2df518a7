"""Measurement suite: ISI-based waveform reconstruction, zero-crossing
counting, THD/SNR spectral metrics, bode sweeps, and cochleograms.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .events import ClockConfig, SpikeStream
from .exceptions import FormatError
from .frontend import pdm_to_raw_spikes
from .nas import NasConfig
from .stimulus import sigma_delta_modulate, synth_sine

DEFAULT_ANALYSIS_RATE_HZ = 100_000.0
DEFAULT_BAND_HZ = 20_000.0
DEFAULT_BIN_MS = 20.0


def default_full_scale_rate(clock: ClockConfig) -> float:
    """Rate of a solid all-ones PDM stream: the net-rate full scale."""
    return clock.pdm_clock_hz


@dataclass(frozen=True)
class ReconstructedWaveform:
    """Normalized signed rate on a uniform grid; |sample| <= 1."""

    samples: np.ndarray
    sample_rate_hz: float
    full_scale_rate: float
    t0_s: float = 0.0

    def times(self) -> np.ndarray:
        return self.t0_s + np.arange(self.samples.size) / self.sample_rate_hz


def reconstruct_from_isi(stream: SpikeStream,
                         analysis_rate_hz: float = DEFAULT_ANALYSIS_RATE_HZ,
                         full_scale_rate: float | None = None,
                         t0_s: float | None = None,
                         t1_s: float | None = None) -> ReconstructedWaveform:
    """Instantaneous-rate reconstruction from inter-spike intervals.

    Between consecutive spikes k and k+1 the value is
    polarity[k+1] / (ISI_seconds * full_scale_rate), clamped to [-1, 1];
    zero before the first spike, held after the last. Each output sample is
    the time average of that piecewise-constant value over its grid cell
    (plain zero-order-hold point sampling would alias the spike-level
    jitter of megahertz streams into the audio band).
    """
    if not len(stream):
        raise ValueError("cannot reconstruct from an empty stream")
    clock = stream.clock
    fsr = full_scale_rate if full_scale_rate is not None \
        else default_full_scale_rate(clock)
    if t0_s is None:
        t0_s = 0.0
    if t1_s is None:
        t1_s = float(stream.t[-1]) / clock.core_clock_hz
    n_cells = int(round((t1_s - t0_s) * analysis_rate_hz))
    if n_cells <= 0:
        raise ValueError("analysis window is empty")
    t = stream.t
    if len(stream) < 2:
        return ReconstructedWaveform(np.zeros(n_cells), analysis_rate_hz,
                                     fsr, t0_s)
    isi_cycles = np.diff(t)
    isi_s = isi_cycles / clock.core_clock_hz
    with np.errstate(divide="ignore"):
        v = stream.polarity[1:] / np.where(isi_cycles > 0, isi_s, np.inf) / fsr
    v = np.where(isi_cycles == 0, stream.polarity[1:].astype(np.float64), v)
    v = np.clip(v, -1.0, 1.0)
    # integrate the piecewise-constant value; difference at cell edges
    bp_t = t / clock.core_clock_hz
    integral = np.concatenate(([0.0], np.cumsum(v * isi_s)))
    edges = t0_s + np.arange(n_cells + 1) / analysis_rate_hz
    at_edges = np.interp(edges, bp_t, integral)
    after = edges > bp_t[-1]
    at_edges[after] = integral[-1] + v[-1] * (edges[after] - bp_t[-1])
    samples = np.clip(np.diff(at_edges) * analysis_rate_hz, -1.0, 1.0)
    return ReconstructedWaveform(samples, analysis_rate_hz, fsr, t0_s)


def count_zero_crossings(stream: SpikeStream) -> int:
    """Number of consecutive-event pairs with opposite polarity."""
    if len(stream) < 2:
        return 0
    return int(np.count_nonzero(stream.polarity[1:] != stream.polarity[:-1]))


class ThdResult(NamedTuple):
    thd_db: float
    fundamental_is_peak: bool


class SnrResult(NamedTuple):
    snr_db: float
    fundamental_is_peak: bool


def _windowed_power(samples: np.ndarray) -> np.ndarray:
    w = np.hanning(samples.size)
    return np.abs(np.fft.rfft(samples * w)) ** 2


def _neighborhood(power: np.ndarray, k: int, half_width: int = 2) -> float:
    lo = max(0, k - half_width)
    return float(power[lo:k + half_width + 1].sum())


def measure_thd(w: ReconstructedWaveform, f0_hz: float,
                n_harmonics: int = 9) -> ThdResult:
    """10*log10(sum of harmonic power h=2..n+1 over fundamental power),
    each taken in a +-2 bin neighborhood of a Hann-windowed spectrum."""
    n = w.samples.size
    fs = w.sample_rate_hz
    if n < 10 * fs / f0_hz:
        raise ValueError("waveform shorter than 10 fundamental periods")
    if f0_hz * (n_harmonics + 1) >= fs / 2:
        raise ValueError("harmonics exceed the analysis Nyquist frequency")
    power = _windowed_power(w.samples)
    k0 = int(round(f0_hz * n / fs))
    p1 = _neighborhood(power, k0)
    ph = sum(_neighborhood(power, int(round(h * f0_hz * n / fs)))
             for h in range(2, n_harmonics + 2))
    is_peak = abs(int(np.argmax(power[1:])) + 1 - k0) <= 2
    return ThdResult(10.0 * math.log10(ph / p1) if p1 > 0 else math.inf,
                     is_peak)


def measure_snr(w: ReconstructedWaveform, f0_hz: float,
                n_harmonics: int = 9,
                band_hz: float = DEFAULT_BAND_HZ) -> SnrResult:
    """Fundamental power over in-band noise power (up to band_hz), noise
    excluding the DC, fundamental and harmonic neighborhoods."""
    n = w.samples.size
    fs = w.sample_rate_hz
    if n < 10 * fs / f0_hz:
        raise ValueError("waveform shorter than 10 fundamental periods")
    power = _windowed_power(w.samples)
    k0 = int(round(f0_hz * n / fs))
    p1 = _neighborhood(power, k0)
    k_band = min(int(band_hz * n / fs), power.size - 1)
    noise = float(power[:k_band + 1].sum())
    noise -= _neighborhood(power, 0)  # DC neighborhood
    noise -= p1
    for h in range(2, n_harmonics + 2):
        kh = int(round(h * f0_hz * n / fs))
        if kh <= k_band:
            noise -= _neighborhood(power, kh)
    is_peak = abs(int(np.argmax(power[1:])) + 1 - k0) <= 2
    if noise <= 0:
        return SnrResult(math.inf, is_peak)
    return SnrResult(10.0 * math.log10(p1 / noise), is_peak)


@dataclass(frozen=True)
class BodePoint:
    freq_hz: float
    gain_db: float
    phase_rad: float


def _lag_anchor(phase: float) -> float:
    """Map a principal-value phase into (-2*pi, 0]: measured as pure lag."""
    while phase > 0:
        phase -= 2.0 * math.pi
    while phase <= -2.0 * math.pi:
        phase += 2.0 * math.pi
    return phase


def bode_sweep(system: Callable[[SpikeStream], SpikeStream],
               freqs: Sequence[float],
               amplitude: float = 0.5,
               settle_periods: int = 5,
               measure_periods: int = 20,
               clock: ClockConfig | None = None,
               analysis_rate_hz: float = DEFAULT_ANALYSIS_RATE_HZ,
               full_scale_rate: float | None = None,
               threads: int = 1) -> list[BodePoint]:
    """Measure gain/phase of a spike-processing system per frequency.

    Per point: synthesize a tone, modulate, run the front-end, apply the
    system, reconstruct, and compare the fundamental against a
    front-end-only reference run of the same stimulus. Gain is the
    amplitude ratio in dB; phase is the spectral phase difference,
    anchored into (-2*pi, 0] at the first point (lag convention) and
    unwrapped along the sweep. A frequency yielding no output spikes
    reports -inf gain and NaN phase.
    """
    clock = clock or ClockConfig()
    if not 0 < amplitude <= 1:
        raise ValueError("amplitude must be in (0, 1]")
    for f in freqs:
        if not 0 < f <= 20000.0:
            raise ValueError(f"sweep frequency {f} outside (0, 20 kHz]")

    def one(f0: float) -> tuple[float, float]:
        duration = (settle_periods + measure_periods) / f0
        tone = synth_sine(f0, amplitude, duration, clock.pdm_clock_hz)
        front = pdm_to_raw_spikes(sigma_delta_modulate(tone, clock))
        out = system(front)
        t0, t1 = settle_periods / f0, duration
        ref = reconstruct_from_isi(front, analysis_rate_hz, full_scale_rate,
                                   t0, t1)
        if not len(out):
            return float("-inf"), float("nan")
        sut = reconstruct_from_isi(out, analysis_rate_hz, full_scale_rate,
                                   t0, t1)
        n = ref.samples.size
        w = np.hanning(n)
        spec_ref = np.fft.rfft(ref.samples * w)
        spec_sut = np.fft.rfft(sut.samples * w)
        k0 = int(round(f0 * n / analysis_rate_hz))
        a_ref = math.sqrt(_neighborhood(np.abs(spec_ref) ** 2, k0))
        a_sut = math.sqrt(_neighborhood(np.abs(spec_sut) ** 2, k0))
        if a_sut == 0 or a_ref == 0:
            return float("-inf"), float("nan")
        gain = 20.0 * math.log10(a_sut / a_ref)
        phase = float(np.angle(spec_sut[k0]) - np.angle(spec_ref[k0]))
        return gain, phase

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, freqs))
    else:
        results = [one(f) for f in freqs]

    points: list[BodePoint] = []
    prev_phase: float | None = None
    for f0, (gain, phase) in zip(freqs, results):
        if math.isnan(phase):
            points.append(BodePoint(float(f0), gain, phase))
            continue
        if prev_phase is None:
            phase = _lag_anchor(phase)
        else:
            while phase - prev_phase > math.pi:
                phase -= 2.0 * math.pi
            while phase - prev_phase < -math.pi:
                phase += 2.0 * math.pi
        points.append(BodePoint(float(f0), gain, phase))
        prev_phase = phase
    return points


def log_spaced_frequencies(f_min: float, f_max: float,
                           points_per_decade: int) -> list[float]:
    """Logarithmically spaced sweep grid, inclusive of both ends."""
    if not 0 < f_min < f_max:
        raise ValueError("need 0 < f_min < f_max")
    if points_per_decade < 1:
        raise ValueError("points_per_decade must be >= 1")
    n = round(points_per_decade * math.log10(f_max / f_min))
    return [f_min * 10 ** (i / points_per_decade) for i in range(n + 1)]


@dataclass(frozen=True)
class Cochleogram:
    """Per-channel event counts over uniform time bins (both polarities).

    rates() gives the same matrix normalized to spikes per second.
    """

    counts: np.ndarray  # [channels x bins]
    bin_ms: float
    ear: int = 0

    def rates(self) -> np.ndarray:
        return self.counts / (self.bin_ms / 1000.0)

    @property
    def total_events(self) -> int:
        return int(self.counts.sum())


def cochleogram(events: SpikeStream, config: NasConfig,
                bin_ms: float = DEFAULT_BIN_MS,
                duration_s: float | None = None) -> list[Cochleogram]:
    """Bin NAS events into [channel x time] count matrices, one per ear."""
    from .nas import NasAddressMap

    amap = NasAddressMap(config.num_channels, config.binaural)
    if len(events) and int(events.address.max()) >= amap.size:
        bad = int(events.address[events.address >= amap.size][0])
        raise FormatError(f"address {bad} outside the bank map "
                          f"[0, {amap.size})")
    bin_cycles = int(round(bin_ms / 1000.0 * config.clock.core_clock_hz))
    if duration_s is not None:
        n_bins = max(1, math.ceil(duration_s * 1000.0 / bin_ms))
    elif len(events):
        n_bins = int(events.t.max() // bin_cycles) + 1
    else:
        n_bins = 1
    ears = 2 if config.binaural else 1
    out = []
    for ear in range(ears):
        counts = np.zeros((config.num_channels, n_bins), np.int64)
        if len(events):
            mask = amap.ears_of(events.address) == ear
            ch = amap.channels_of(events.address[mask])
            bins = np.minimum(events.t[mask] // bin_cycles, n_bins - 1)
            np.add.at(counts, (ch, bins), 1)
        out.append(Cochleogram(counts, bin_ms, ear))
    return out
