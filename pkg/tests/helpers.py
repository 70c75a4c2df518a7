"""Shared test utilities: random stream generation and independent oracles."""
from __future__ import annotations

import math

import numpy as np

from pdmnas import ClockConfig, SpikeStream


def random_stream(rng: np.random.Generator, clock: ClockConfig,
                  max_t: int = 2000, max_events: int = 60,
                  pos_addr: int = 1, neg_addr: int = 0) -> SpikeStream:
    """Random valid single-pair stream: unique sorted times, random signs."""
    n = int(rng.integers(0, max_events + 1))
    t = np.sort(rng.choice(max_t, size=min(n, max_t), replace=False))
    pol = rng.choice(np.array([-1, 1], np.int8), size=t.size)
    return SpikeStream.from_polarities(t.astype(np.int64), pol, clock,
                                       pos_addr, neg_addr)


def uniform_stream(rate_hz: float, duration_s: float, clock: ClockConfig,
                   polarity: int = 1, phase_cycles: int = 0,
                   pos_addr: int = 1, neg_addr: int = 0) -> SpikeStream:
    """Evenly spaced spikes at an exact average rate (accumulator spacing)."""
    core = clock.core_clock_hz
    n = int(round(rate_hz * duration_s))
    t = phase_cycles + np.floor(
        (np.arange(n, dtype=np.float64) + 0.5) * core / rate_hz).astype(np.int64)
    pol = np.full(n, polarity, np.int8)
    return SpikeStream.from_polarities(t, pol, clock, pos_addr, neg_addr)


def exhaustive_cutoff_search(cutoff_hz: float, core_clock_hz: int,
                             n_lo: int = 10, n_hi: int = 28):
    """Independent brute-force oracle for the (gain, n_bits) solver:
    minimal relative error, ties broken toward smaller n_bits then gain."""
    best = None
    for n_bits in range(n_lo, n_hi + 1):
        denom = 2.0 * math.pi * (1 << n_bits)
        ideal = denom * cutoff_hz / core_clock_hz
        for g in {max(1, math.floor(ideal)), max(1, math.ceil(ideal)),
                  max(1, round(ideal))}:
            realized = g * core_clock_hz / denom
            err = abs(realized - cutoff_hz) / cutoff_hz
            key = (err, n_bits, g)
            if best is None or key < best:
                best = key
    return best  # (error, n_bits, gain)


def generator_count_oracle(step: int, n_bits: int, ticks: int,
                           acc0: int = 0) -> int:
    """Spikes emitted by a phase accumulator over `ticks` ticks of constant
    step: floor((acc0 + ticks*step)/2^N) - floor(acc0/2^N)."""
    lim = 1 << n_bits
    return (acc0 + ticks * step) // lim - acc0 // lim


def generator_spike_ticks_oracle(step: int, n_bits: int, ticks: int,
                                 acc0: int = 0) -> np.ndarray:
    """Tick indices at which the accumulator overflows (vectorized)."""
    lim = 1 << n_bits
    i = np.arange(1, ticks + 1, dtype=np.int64)
    counts = (acc0 + i * step) // lim
    return np.nonzero(np.diff(np.concatenate(([acc0 // lim], counts))))[0]


def first_order_step_window_average(rate_final: float, cutoff_hz: float,
                                    window_s: float,
                                    n_windows: int) -> np.ndarray:
    """Analytic first-order step response r*(1 - exp(-k t)), averaged over
    consecutive windows: the independent trajectory oracle."""
    k = 2.0 * math.pi * cutoff_hz
    edges = np.arange(n_windows + 1, dtype=np.float64) * window_s
    # integral of (1 - exp(-k t)) from 0 to T: T - (1 - exp(-k T))/k
    integ = edges - (1.0 - np.exp(-k * edges)) / k
    return rate_final * np.diff(integ) / window_s


def windowed_rates(stream: SpikeStream, window_s: float,
                   n_windows: int) -> np.ndarray:
    """Net spike count per window divided by window length."""
    core = stream.clock.core_clock_hz
    win_cycles = int(round(window_s * core))
    edges = np.arange(n_windows + 1, dtype=np.int64) * win_cycles
    idx = np.searchsorted(stream.t, edges)
    csum = np.concatenate(([0], np.cumsum(stream.polarity.astype(np.int64))))
    return (csum[idx[1:]] - csum[idx[:-1]]) / window_s
