"""Per-cycle reference implementations of the spike-processing blocks.

These loops advance one core-clock cycle at a time and define the ground
truth the event-driven kernels must reproduce bit for bit. They are kept
deliberately simple (plain Python, no shortcuts) and are only suitable for
short inputs.
"""
from __future__ import annotations

import numpy as np

from .events import SpikeStream
from .frontend import SBPF_NEG_ADDR, SBPF_POS_ADDR
from .ssp import (HoldAndFireParams, HoldAndFireStats, SlpfParams, SlpfStats,
                  SpikeGenState)


def slpf_process_reference(stream: SpikeStream, params: SlpfParams,
                           t_end: int | None = None,
                           pos_addr: int = SBPF_POS_ADDR,
                           neg_addr: int = SBPF_NEG_ADDR,
                           with_stats: bool = False):
    """Cycle-by-cycle SLPF. Per cycle: add input polarities into the
    integrator (clamped), tick the generator with drive I, feed an emitted
    spike back into I at the end of the cycle."""
    gen = SpikeGenState(n_bits=params.n_bits, gain=params.gain)
    integrator = 0
    sat_i = 0
    limit = params.integrator_limit
    events: dict[int, list[int]] = {}
    for t, p in zip(stream.t.tolist(), stream.polarity.tolist()):
        events.setdefault(t, []).append(p)
    last_in = int(stream.t[-1]) if len(stream) else -1
    out_t: list[int] = []
    out_p: list[int] = []
    t = 0
    while True:
        if t_end is not None:
            if t >= t_end:
                break
        elif t > last_in and integrator == 0:
            break
        for p in events.get(t, ()):
            integrator += p
            if integrator > limit:
                integrator = limit
                sat_i += 1
            elif integrator < -limit:
                integrator = -limit
                sat_i += 1
        emitted = gen.tick(integrator)
        if emitted:
            out_t.append(t)
            out_p.append(emitted)
            integrator -= emitted
        t += 1
    out = SpikeStream.from_polarities(np.array(out_t, np.int64),
                                      np.array(out_p, np.int8),
                                      stream.clock, pos_addr, neg_addr)
    if with_stats:
        return out, SlpfStats(sat_i, gen.saturations, integrator,
                              gen.accumulator)
    return out


def hold_and_fire_reference(a: SpikeStream, b: SpikeStream,
                            params: HoldAndFireParams = HoldAndFireParams(),
                            pos_addr: int = SBPF_POS_ADDR,
                            neg_addr: int = SBPF_NEG_ADDR,
                            with_stats: bool = False):
    """Cycle-by-cycle hold-and-fire. Per cycle: fire held spikes whose hold
    expired, then process this cycle's arrivals (a before b, b inverted):
    an opposite-polarity arrival cancels the oldest held spike, a same-cycle
    duplicate collapses, anything else joins the hold queue."""
    if a.clock != b.clock:
        raise ValueError("streams must share a ClockConfig")
    hold = params.hold_cycles
    arrivals: dict[int, list[int]] = {}
    for t, p in zip(a.t.tolist(), a.polarity.tolist()):
        arrivals.setdefault(t, []).append(p)
    for t, p in zip(b.t.tolist(), b.polarity.tolist()):
        arrivals.setdefault(t, []).append(-p)
    queue: list[int] = []  # arrival cycles of held spikes, oldest first
    q_pol = 0
    merged = 0
    out_t: list[int] = []
    out_p: list[int] = []
    if arrivals:
        t_last = max(arrivals)
        for t in range(min(arrivals), t_last + hold + 1):
            while queue and queue[0] + hold <= t:
                out_t.append(queue.pop(0) + hold)
                out_p.append(q_pol)
            for pol in arrivals.get(t, ()):
                if queue and q_pol != pol:
                    queue.pop(0)
                elif queue and queue[-1] == t:
                    merged += 1
                else:
                    queue.append(t)
                    q_pol = pol
    out = SpikeStream.from_polarities(np.array(out_t, np.int64),
                                      np.array(out_p, np.int8),
                                      a.clock, pos_addr, neg_addr)
    if with_stats:
        return out, HoldAndFireStats(merged)
    return out


def sbpf_process_reference(stream: SpikeStream, config, hf_params=None,
                           t_end: int | None = None) -> SpikeStream:
    """Per-cycle composition mirroring ssp.sbpf_process."""
    from .ssp import SbpfConfig, cutoff_to_params  # local to avoid cycle

    assert isinstance(config, SbpfConfig)
    hf_params = hf_params or HoldAndFireParams()
    core = stream.clock.core_clock_hz
    high = cutoff_to_params(config.f_high_hz, core)
    low = cutoff_to_params(config.f_low_hz, core)
    branch_high = slpf_process_reference(stream, high, t_end)
    branch_low = slpf_process_reference(stream, low, t_end)
    return hold_and_fire_reference(branch_high, branch_low, hf_params)
