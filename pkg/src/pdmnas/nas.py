"""Neuromorphic auditory sensor: a cascade of SLPF stages whose channel
outputs are hold-and-fire differences between consecutive stages.

Stage cutoffs run geometrically from f_start down to f_end; channel i
passes the band (f_{i+1}, f_i), so low channel indices carry high
frequencies. Addresses are 2*channel + 1 for positive and 2*channel for
negative spikes; a binaural bank offsets right-ear addresses by
2*num_channels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .events import ClockConfig, SpikeStream, merge_streams
from .exceptions import ConfigError
from .ssp import (DEFAULT_HOLD_CYCLES, HoldAndFireParams, SlpfParams,
                  cutoff_to_params, hold_and_fire, slpf_process)


@dataclass(frozen=True)
class NasConfig:
    num_channels: int = 64
    f_start_hz: float = 20000.0  # highest band edge
    f_end_hz: float = 20.0       # lowest band edge
    binaural: bool = False
    hold_cycles: int = DEFAULT_HOLD_CYCLES
    clock: ClockConfig = field(default_factory=ClockConfig)

    def __post_init__(self):
        if self.num_channels < 1:
            raise ConfigError("num_channels must be >= 1")
        if not 0 < self.f_end_hz < self.f_start_hz:
            raise ConfigError(
                f"need 0 < f_end < f_start, got ({self.f_end_hz}, {self.f_start_hz})")

    def stage_cutoffs(self) -> np.ndarray:
        """Geometric ladder f_i = f_start * (f_end/f_start)^(i/C), i = 0..C."""
        c = self.num_channels
        i = np.arange(c + 1, dtype=np.float64)
        return self.f_start_hz * (self.f_end_hz / self.f_start_hz) ** (i / c)

    def channel_band(self, channel: int) -> tuple[float, float]:
        """(low, high) edges of one channel's passband."""
        f = self.stage_cutoffs()
        return float(f[channel + 1]), float(f[channel])


@dataclass(frozen=True)
class NasAddressMap:
    """Bijective map between (ear, channel, polarity) and event addresses."""

    num_channels: int
    binaural: bool

    @property
    def size(self) -> int:
        return (4 if self.binaural else 2) * self.num_channels

    def encode(self, channel: int, polarity: int, ear: int = 0) -> int:
        if not 0 <= channel < self.num_channels:
            raise ValueError(f"channel {channel} out of range")
        if ear not in (0, 1) or (ear == 1 and not self.binaural):
            raise ValueError(f"invalid ear {ear}")
        return ear * 2 * self.num_channels + 2 * channel + (1 if polarity > 0 else 0)

    def decode(self, address: int) -> tuple[int, int, int]:
        """address -> (ear, channel, polarity)."""
        if not 0 <= address < self.size:
            raise ValueError(f"address {address} outside map [0, {self.size})")
        ear, rest = divmod(address, 2 * self.num_channels)
        channel, odd = divmod(rest, 2)
        return ear, channel, 1 if odd else -1

    def channels_of(self, addresses: np.ndarray) -> np.ndarray:
        return (np.asarray(addresses, np.int64) % (2 * self.num_channels)) // 2

    def ears_of(self, addresses: np.ndarray) -> np.ndarray:
        return np.asarray(addresses, np.int64) // (2 * self.num_channels)


@dataclass(frozen=True)
class NasBank:
    config: NasConfig
    stage_params: tuple[SlpfParams, ...]
    address_map: NasAddressMap

    @property
    def num_stages(self) -> int:
        return len(self.stage_params)


def build_nas(config: NasConfig) -> NasBank:
    """Solve filter parameters for every cascade stage.

    C channels need C+1 stages; a failing cutoff names the stage.
    """
    params = []
    for i, fc in enumerate(config.stage_cutoffs()):
        try:
            params.append(cutoff_to_params(float(fc), config.clock.core_clock_hz))
        except ValueError as e:
            raise ConfigError(f"stage {i} (cutoff {fc:.6g} Hz): {e}") from e
    return NasBank(config, tuple(params),
                   NasAddressMap(config.num_channels, config.binaural))


def _process_ear(front_end: SpikeStream, bank: NasBank, ear: int,
                 t_end: int | None) -> list[SpikeStream]:
    """Cascade one ear; returns the address-coded stream of every channel."""
    cfg = bank.config
    hf = HoldAndFireParams(cfg.hold_cycles)
    channels: list[SpikeStream] = []
    prev = slpf_process(front_end, bank.stage_params[0], t_end)
    for i in range(cfg.num_channels):
        nxt = slpf_process(prev, bank.stage_params[i + 1], t_end)
        channels.append(hold_and_fire(
            prev, nxt, hf,
            pos_addr=bank.address_map.encode(i, 1, ear),
            neg_addr=bank.address_map.encode(i, -1, ear)))
        prev = nxt
    return channels


def nas_process(bank: NasBank, left: SpikeStream,
                right: SpikeStream | None = None,
                t_end: int | None = None) -> SpikeStream:
    """Run front-end spikes through the bank; returns the merged,
    timestamp-ordered, address-coded stream (both ears when binaural)."""
    if bank.config.binaural and right is None:
        raise ValueError("binaural bank needs both ear streams")
    if not bank.config.binaural and right is not None:
        raise ValueError("monaural bank got a second ear stream")
    streams = _process_ear(left, bank, 0, t_end)
    if right is not None:
        streams += _process_ear(right, bank, 1, t_end)
    return merge_streams(*streams)
