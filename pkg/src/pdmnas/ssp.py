"""Spike signal processing blocks: phase-accumulator spike generator,
first-order spike low-pass filter (SLPF), spike hold-and-fire subtractor,
and the band-pass filter (SBPF) composed from them.

The SLPF is an integrate-and-generate loop: an integrator counts input
minus output spikes and drives a phase-accumulator generator, giving
first-order rate dynamics dI/dt = f_in - k*I with k = g*f_clk/2^N, unity
DC gain, and cutoff f_c = k/(2*pi).

Production entry points (slpf_process, hold_and_fire, sbpf_process) run
event-driven kernels that skip idle cycles; they are bit-identical to the
per-cycle loops in ``reference.py``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._kernels import hold_and_fire_kernel, slpf_event_kernel
from .events import SpikeStream
from .frontend import SBPF_NEG_ADDR, SBPF_POS_ADDR

DEFAULT_INTEGRATOR_LIMIT = 2 ** 15 - 1
DEFAULT_HOLD_CYCLES = 1024
N_BITS_RANGE = (10, 28)
CUTOFF_TOLERANCE = 0.02


@dataclass
class SpikeGenState:
    """Phase-accumulator spike generator.

    Each tick with drive v advances the accumulator by g*|v| (saturated to
    2^N - 1, counted); on overflow it wraps and emits one spike of
    polarity sign(v). Zero drive leaves the accumulator untouched. For a
    constant drive the emission rate is f_clk * g * |v| / 2^N and the
    inter-spike intervals take at most two adjacent integer values.
    """

    n_bits: int = 20
    gain: int = 1
    accumulator: int = 0
    saturations: int = 0

    def __post_init__(self):
        if not N_BITS_RANGE[0] <= self.n_bits <= N_BITS_RANGE[1]:
            raise ValueError(f"n_bits must be in {N_BITS_RANGE}")
        if self.gain < 1:
            raise ValueError("gain must be a positive integer")
        if not 0 <= self.accumulator < (1 << self.n_bits):
            raise ValueError("accumulator out of range")

    def tick(self, drive: int) -> int:
        """Advance one clock cycle; returns emitted polarity (+1/-1) or 0."""
        if drive == 0:
            return 0
        limit = 1 << self.n_bits
        step = self.gain * abs(drive)
        if step >= limit:
            step = limit - 1
            self.saturations += 1
        self.accumulator += step
        if self.accumulator >= limit:
            self.accumulator -= limit
            return 1 if drive > 0 else -1
        return 0


@dataclass(frozen=True)
class SlpfParams:
    """Integer parameters of one SLPF stage.

    The realized cutoff is gain * core_clock_hz / (2*pi * 2^n_bits); use
    cutoff_to_params to solve (gain, n_bits) for a target. integrator_limit
    clamps |I| (clamps are counted, not raised).
    """

    cutoff_hz: float
    gain: int
    n_bits: int
    integrator_limit: int = DEFAULT_INTEGRATOR_LIMIT

    def realized_cutoff_hz(self, core_clock_hz: int) -> float:
        return self.gain * core_clock_hz / (2.0 * math.pi * 2 ** self.n_bits)


@dataclass(frozen=True)
class SbpfConfig:
    """Band edges of the band-pass: the SLPF on the subtractor's positive
    input runs at f_high_hz, the one on the negative input at f_low_hz."""

    f_low_hz: float = 70.0
    f_high_hz: float = 12000.0

    def __post_init__(self):
        if not 0 < self.f_low_hz < self.f_high_hz:
            raise ValueError(
                f"need 0 < f_low < f_high, got ({self.f_low_hz}, {self.f_high_hz})")


@dataclass(frozen=True)
class HoldAndFireParams:
    """Cancellation window of the spike subtractor, in core cycles.

    The window must span several inter-spike intervals of the streams being
    subtracted for the cancellation to pair spikes (the default covers
    rates down to ~50 k spikes/s at 50 MHz); it also sets the block's
    high-frequency rejection corner at roughly 1/(2*hold).
    """

    hold_cycles: int = DEFAULT_HOLD_CYCLES

    def __post_init__(self):
        if self.hold_cycles < 1:
            raise ValueError("hold_cycles must be >= 1")


def cutoff_to_params(cutoff_hz: float, core_clock_hz: int,
                     integrator_limit: int = DEFAULT_INTEGRATOR_LIMIT) -> SlpfParams:
    """Solve integer (gain, n_bits) minimizing relative cutoff error under
    f_c = g * f_clk / (2*pi * 2^N); ties prefer smaller n_bits, then smaller
    gain. Raises if no solution lands within 2%."""
    if not 1.0 <= cutoff_hz <= core_clock_hz / 100:
        raise ValueError(
            f"cutoff_hz must be in [1, core/100], got {cutoff_hz}")
    best: tuple[float, int, int] | None = None
    for n_bits in range(N_BITS_RANGE[0], N_BITS_RANGE[1] + 1):
        ideal = 2.0 * math.pi * (1 << n_bits) * cutoff_hz / core_clock_hz
        g = max(1, round(ideal))
        realized = g * core_clock_hz / (2.0 * math.pi * (1 << n_bits))
        err = abs(realized - cutoff_hz) / cutoff_hz
        if best is None or err < best[0] * (1 - 1e-12):
            best = (err, n_bits, g)
    err, n_bits, g = best
    if err > CUTOFF_TOLERANCE:
        raise ValueError(
            f"no (gain, n_bits) realizes {cutoff_hz} Hz within "
            f"{CUTOFF_TOLERANCE:.0%} (best error {err:.2%})")
    return SlpfParams(cutoff_hz, g, n_bits, integrator_limit)


class SlpfStats(NamedTuple):
    integrator_saturations: int
    generator_saturations: int
    final_integrator: int
    final_accumulator: int


class HoldAndFireStats(NamedTuple):
    merged_same_cycle: int


def slpf_process(stream: SpikeStream, params: SlpfParams,
                 t_end: int | None = None,
                 pos_addr: int = SBPF_POS_ADDR, neg_addr: int = SBPF_NEG_ADDR,
                 with_stats: bool = False):
    """Run the SLPF over a stream.

    t_end bounds the simulation (exclusive, in cycles); None runs past the
    last input until the integrator drains to zero. Unity DC gain: for a
    constant input rate the output rate converges to the input rate.
    """
    out_t, out_p, i_fin, acc_fin, sat_i, sat_g = slpf_event_kernel(
        stream.t, stream.polarity,
        np.int64(-1 if t_end is None else t_end),
        np.int64(params.gain), np.int64(params.n_bits),
        np.int64(params.integrator_limit), np.int64(0), np.int64(0))
    out = SpikeStream.from_polarities(out_t, out_p, stream.clock,
                                      pos_addr, neg_addr)
    if with_stats:
        return out, SlpfStats(int(sat_i), int(sat_g), int(i_fin), int(acc_fin))
    return out


def hold_and_fire(a: SpikeStream, b: SpikeStream,
                  params: HoldAndFireParams = HoldAndFireParams(),
                  pos_addr: int = SBPF_POS_ADDR, neg_addr: int = SBPF_NEG_ADDR,
                  with_stats: bool = False):
    """Subtract spike rates: output tracks rate(a) - rate(b).

    b's polarities are inverted and the streams merged in time order (ties:
    a first). Every spike is held for hold_cycles; an arrival of opposite
    polarity cancels the oldest held spike (both vanish), otherwise it joins
    the hold queue. Survivors fire at arrival + hold_cycles. Held spikes all
    share one polarity, so positive and negative output activity never
    overlaps. A same-cycle same-polarity duplicate is collapsed and counted.
    """
    if a.clock != b.clock:
        raise ValueError("streams must share a ClockConfig")
    out_t, out_p, merged = hold_and_fire_kernel(
        a.t, a.polarity, b.t, b.polarity, np.int64(params.hold_cycles))
    out = SpikeStream.from_polarities(out_t, out_p, a.clock, pos_addr, neg_addr)
    if with_stats:
        return out, HoldAndFireStats(int(merged))
    return out


def sbpf_process(stream: SpikeStream, config: SbpfConfig = SbpfConfig(),
                 hf_params: HoldAndFireParams = HoldAndFireParams(),
                 t_end: int | None = None,
                 pos_addr: int = SBPF_POS_ADDR,
                 neg_addr: int = SBPF_NEG_ADDR) -> SpikeStream:
    """Band-pass: hold_and_fire(slpf(f_high), slpf(f_low)).

    Passes (f_low, f_high) and rejects DC (both branches converge to the
    same rate and cancel) plus high frequencies (branch rolloff and the
    hold window's cancellation).
    """
    core = stream.clock.core_clock_hz
    high = cutoff_to_params(config.f_high_hz, core)
    low = cutoff_to_params(config.f_low_hz, core)
    branch_high = slpf_process(stream, high, t_end)
    branch_low = slpf_process(stream, low, t_end)
    return hold_and_fire(branch_high, branch_low, hf_params,
                         pos_addr=pos_addr, neg_addr=neg_addr)
