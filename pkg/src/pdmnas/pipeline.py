"""End-to-end pipelines shared by the CLI and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import (ReconstructedWaveform, SnrResult, ThdResult,
                       count_zero_crossings, measure_snr, measure_thd,
                       reconstruct_from_isi)
from .config import RunConfig
from .events import SpikeStream, merge_streams
from .frontend import pdm_to_raw_spikes
from .nas import NasBank, build_nas, nas_process
from .ssp import sbpf_process
from .stimulus import Waveform, resample_zoh, sigma_delta_modulate


@dataclass(frozen=True)
class PsiRun:
    front_end: SpikeStream
    output: SpikeStream
    merged: SpikeStream
    duration_cycles: int


def run_psi(config: RunConfig, wave: Waveform) -> PsiRun:
    """stimulus -> modulator -> front-end -> band-pass; merged stream carries
    the front-end debug addresses (3/2) plus the output pair (1/0)."""
    clock = config.clock
    pdm_rate = clock.pdm_clock_hz
    if wave.sample_rate_hz != pdm_rate:
        wave = resample_zoh(wave, pdm_rate)
    pdm = sigma_delta_modulate(wave, clock)
    front = pdm_to_raw_spikes(pdm)
    t_end = pdm.duration_cycles
    out = sbpf_process(front, config.psi_band, config.hold, t_end=t_end)
    return PsiRun(front, out, merge_streams(front, out), t_end)


@dataclass(frozen=True)
class PsiMetrics:
    zero_crossings_frontend: int
    zero_crossings_output: int
    thd_db: float
    snr_db: float
    fundamental_hz: float
    fundamental_is_peak: bool


def measure_psi(run: PsiRun, config: RunConfig,
                f0_hz: float | None = None) -> tuple[PsiMetrics,
                                                     ReconstructedWaveform,
                                                     ReconstructedWaveform]:
    """Zero crossings plus THD/SNR of the reconstructed output.

    f0_hz defaults to the strongest spectral line of the output (used for
    WAV inputs where the fundamental is not known a priori).
    """
    clock = config.clock
    t1_s = run.duration_cycles / clock.core_clock_hz
    fsr = config.effective_full_scale_rate()
    rec_front = reconstruct_from_isi(run.front_end, config.analysis_rate_hz,
                                     fsr, 0.0, t1_s)
    zc_front = count_zero_crossings(run.front_end)
    zc_out = count_zero_crossings(run.output)
    if len(run.output) < 4:
        rec_out = ReconstructedWaveform(
            rec_front.samples * 0.0, config.analysis_rate_hz, fsr, 0.0)
        return (PsiMetrics(zc_front, zc_out, float("nan"), float("nan"),
                           float("nan"), False),
                rec_front, rec_out)
    rec_out = reconstruct_from_isi(run.output, config.analysis_rate_hz,
                                   fsr, 0.0, t1_s)
    if f0_hz is None:
        power = np.abs(np.fft.rfft(rec_out.samples * np.hanning(
            rec_out.samples.size))) ** 2
        k = int(np.argmax(power[1:])) + 1
        f0_hz = k * config.analysis_rate_hz / rec_out.samples.size
    try:
        thd: ThdResult = measure_thd(rec_out, f0_hz)
        snr: SnrResult = measure_snr(rec_out, f0_hz)
        metrics = PsiMetrics(zc_front, zc_out, thd.thd_db, snr.snr_db,
                             f0_hz, thd.fundamental_is_peak)
    except ValueError:
        metrics = PsiMetrics(zc_front, zc_out, float("nan"), float("nan"),
                             f0_hz, False)
    return metrics, rec_front, rec_out


@dataclass(frozen=True)
class NasRun:
    bank: NasBank
    events: SpikeStream
    duration_cycles: int


def run_nas(config: RunConfig, waves: list[Waveform]) -> NasRun:
    """Front-end per ear, then the cascade bank; waves carries one waveform
    (monaural) or two (binaural, left first)."""
    bank = build_nas(config.nas)
    expected = 2 if config.nas.binaural else 1
    if len(waves) != expected:
        raise ValueError(
            f"{'binaural' if config.nas.binaural else 'monaural'} bank needs "
            f"{expected} input channel(s), got {len(waves)}")
    clock = config.clock
    fronts = []
    t_end = 0
    for w in waves:
        if w.sample_rate_hz != clock.pdm_clock_hz:
            w = resample_zoh(w, clock.pdm_clock_hz)
        pdm = sigma_delta_modulate(w, clock)
        t_end = max(t_end, pdm.duration_cycles)
        fronts.append(pdm_to_raw_spikes(pdm))
    events = nas_process(bank, fronts[0],
                         fronts[1] if len(fronts) > 1 else None, t_end=t_end)
    return NasRun(bank, events, t_end)
