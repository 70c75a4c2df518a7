"""Clocking, spike events, spike streams and their CSV serialization.

Timestamps are core-clock cycle counts (int64) everywhere; seconds only
appear at analysis boundaries. Streams are immutable once constructed and
safe to share across threads.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

import numpy as np

from .exceptions import FormatError

DEFAULT_CORE_CLOCK_HZ = 50_000_000
DEFAULT_PDM_DIVISOR = 16


@dataclass(frozen=True)
class ClockConfig:
    """Core clock and the divided PDM bit clock.

    The PDM clock is derived exactly: pdm_clock_hz * pdm_divisor ==
    core_clock_hz (the divisor must divide the core frequency).
    """

    core_clock_hz: int = DEFAULT_CORE_CLOCK_HZ
    pdm_divisor: int = DEFAULT_PDM_DIVISOR

    def __post_init__(self):
        if self.core_clock_hz <= 0:
            raise ValueError("core_clock_hz must be positive")
        if self.pdm_divisor < 2:
            raise ValueError("pdm_divisor must be >= 2")
        if self.core_clock_hz % self.pdm_divisor != 0:
            raise ValueError(
                f"core_clock_hz ({self.core_clock_hz}) must be divisible by "
                f"pdm_divisor ({self.pdm_divisor})"
            )

    @property
    def pdm_clock_hz(self) -> float:
        return self.core_clock_hz / self.pdm_divisor

    def cycles_to_seconds(self, t):
        return np.asarray(t, dtype=np.float64) / self.core_clock_hz

    def seconds_to_cycles(self, seconds: float) -> int:
        return int(round(seconds * self.core_clock_hz))


@dataclass(frozen=True)
class SpikeEvent:
    """A single signed spike: timestamp in core cycles, polarity, address."""

    t: int
    polarity: int
    address: int

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")
        if self.t < 0 or self.address < 0:
            raise ValueError("t and address must be non-negative")


def _as_array(values, dtype):
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("event fields must be one-dimensional")
    return arr


@dataclass(frozen=True)
class SpikeStream:
    """Time-ordered signed spikes on a shared clock.

    Invariants (checked at construction): timestamps non-decreasing,
    polarities in {-1, +1}, at most one event per (t, address) pair.
    Streams whose timestamps were quantized by serialization (microsecond
    AER files) may legitimately collapse distinct cycles onto one stamp;
    they carry quantized=True and skip the per-(t, address) uniqueness
    check while keeping every other invariant.
    """

    t: np.ndarray
    polarity: np.ndarray
    address: np.ndarray
    clock: ClockConfig = field(default_factory=ClockConfig)
    quantized: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t", _as_array(self.t, np.int64))
        object.__setattr__(self, "polarity", _as_array(self.polarity, np.int8))
        object.__setattr__(self, "address", _as_array(self.address, np.uint32))
        n = self.t.size
        if self.polarity.size != n or self.address.size != n:
            raise ValueError("t, polarity, address must have equal length")
        if n:
            if self.t[0] < 0:
                raise ValueError("timestamps must be non-negative")
            dt = np.diff(self.t)
            if np.any(dt < 0):
                raise ValueError("timestamps must be monotonically non-decreasing")
            if not np.all((self.polarity == 1) | (self.polarity == -1)):
                raise ValueError("polarities must be +1 or -1")
            if not self.quantized:
                same_t = dt == 0
                if np.any(same_t & (np.diff(self.address.astype(np.int64)) == 0)):
                    raise ValueError("duplicate event at same (t, address)")

    @classmethod
    def empty(cls, clock: ClockConfig | None = None) -> "SpikeStream":
        return cls(np.empty(0, np.int64), np.empty(0, np.int8),
                   np.empty(0, np.uint32), clock or ClockConfig())

    @classmethod
    def from_polarities(cls, t, polarity, clock: ClockConfig,
                        pos_addr: int = 1, neg_addr: int = 0) -> "SpikeStream":
        """Build a stream on one address pair; the address encodes polarity."""
        t = _as_array(t, np.int64)
        polarity = _as_array(polarity, np.int8)
        address = np.where(polarity > 0, np.uint32(pos_addr), np.uint32(neg_addr))
        return cls(t, polarity, address.astype(np.uint32), clock)

    @classmethod
    def from_events(cls, events: Iterable[SpikeEvent],
                    clock: ClockConfig | None = None) -> "SpikeStream":
        ev = list(events)
        return cls(np.array([e.t for e in ev], np.int64),
                   np.array([e.polarity for e in ev], np.int8),
                   np.array([e.address for e in ev], np.uint32),
                   clock or ClockConfig())

    def __len__(self) -> int:
        return int(self.t.size)

    def __iter__(self) -> Iterator[SpikeEvent]:
        for i in range(self.t.size):
            yield SpikeEvent(int(self.t[i]), int(self.polarity[i]),
                             int(self.address[i]))

    @property
    def duration_s(self) -> float:
        if not len(self):
            return 0.0
        return float(self.t[-1] - self.t[0]) / self.clock.core_clock_hz

    def select_addresses(self, addresses) -> "SpikeStream":
        mask = np.isin(self.address, np.asarray(addresses, np.uint32))
        return SpikeStream(self.t[mask], self.polarity[mask],
                           self.address[mask], self.clock, self.quantized)

    def time_slice(self, t0_cycles: int, t1_cycles: int) -> "SpikeStream":
        """Events with t0 <= t < t1."""
        i0 = int(np.searchsorted(self.t, t0_cycles, side="left"))
        i1 = int(np.searchsorted(self.t, t1_cycles, side="left"))
        return SpikeStream(self.t[i0:i1], self.polarity[i0:i1],
                           self.address[i0:i1], self.clock, self.quantized)


def merge_streams(*streams: SpikeStream) -> SpikeStream:
    """Merge streams into one, ordered by timestamp.

    Equal timestamps keep the argument order (stable), which makes merged
    output reproducible byte for byte.
    """
    if not streams:
        raise ValueError("need at least one stream")
    clock = streams[0].clock
    for s in streams[1:]:
        if s.clock != clock:
            raise ValueError("streams must share a ClockConfig")
    t = np.concatenate([s.t for s in streams])
    pol = np.concatenate([s.polarity for s in streams])
    addr = np.concatenate([s.address for s in streams])
    order = np.argsort(t, kind="stable")
    return SpikeStream(t[order], pol[order], addr[order], clock,
                       quantized=any(s.quantized for s in streams))


def rate_of(stream: SpikeStream, window: tuple[float, float]) -> float:
    """Signed spike rate over [t0_s, t1_s): (n_pos - n_neg) / seconds."""
    t0_s, t1_s = window
    if not t1_s > t0_s:
        raise ValueError(f"window must have positive length, got {window}")
    c0 = int(round(t0_s * stream.clock.core_clock_hz))
    c1 = int(round(t1_s * stream.clock.core_clock_hz))
    i0 = int(np.searchsorted(stream.t, c0, side="left"))
    i1 = int(np.searchsorted(stream.t, c1, side="left"))
    net = int(np.sum(stream.polarity[i0:i1], dtype=np.int64))
    return net / (t1_s - t0_s)


CSV_HEADER = "t_cycles,address,polarity"


def write_csv_events(stream: SpikeStream, sink: TextIO) -> int:
    """Write events as CSV at native cycle resolution; returns line count."""
    sink.write(CSV_HEADER + "\n")
    if len(stream):
        cols = np.empty((len(stream), 3), np.int64)
        cols[:, 0] = stream.t
        cols[:, 1] = stream.address
        cols[:, 2] = stream.polarity
        out = "\n".join(f"{a},{b},{c}" for a, b, c in cols)
        sink.write(out + "\n")
    return len(stream) + 1


def read_csv_events(source: TextIO, clock: ClockConfig | None = None) -> SpikeStream:
    header = source.readline().strip()
    if header != CSV_HEADER:
        raise FormatError(f"expected CSV header {CSV_HEADER!r}, got {header!r}")
    body = source.read()
    if not body.strip():
        return SpikeStream.empty(clock)
    rows = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.int64, ndmin=2)
    return SpikeStream(rows[:, 0], rows[:, 2], rows[:, 1], clock or ClockConfig())
