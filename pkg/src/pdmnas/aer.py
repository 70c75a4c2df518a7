"""AER event-file reader/writer (AEDAT-2.0 style layout).

File layout: a text header whose first line is "#!AER-DAT2.0", then 8-byte
big-endian records of (uint32 address, uint32 timestamp in microseconds).
Polarity on read is recovered from address parity: odd addresses are
positive, even addresses negative.

Cycle-resolution fidelity is not representable here (1 us quantization);
use the CSV event format for exact timestamps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .events import ClockConfig, SpikeStream
from .exceptions import AerIoError, FormatError

HEADER_MAGIC = b"#!AER-DAT"
HEADER_LINE = b"#!AER-DAT2.0\r\n"
RECORD_SIZE = 8
_US = 1_000_000


def cycles_to_timestamp_us(t_cycles: np.ndarray, clock: ClockConfig) -> np.ndarray:
    """round(t / core_hz * 1e6), ties away from zero handled as half-up."""
    t = np.asarray(t_cycles, dtype=np.int64)
    f = clock.core_clock_hz
    return (t * _US + f // 2) // f


def write_aer(stream: SpikeStream, sink: BinaryIO) -> int:
    """Write header + one record per event; returns bytes written."""
    written = 0
    try:
        sink.write(HEADER_LINE)
        written += len(HEADER_LINE)
        if len(stream):
            ts_us = cycles_to_timestamp_us(stream.t, stream.clock)
            if np.any(ts_us > 0xFFFFFFFF):
                raise ValueError("timestamp exceeds 32-bit microsecond range")
            buf = np.empty((len(stream), 2), dtype=">u4")
            buf[:, 0] = stream.address
            buf[:, 1] = ts_us
            payload = buf.tobytes()
            sink.write(payload)
            written += len(payload)
    except OSError as e:
        raise AerIoError(f"AER sink write failed: {e}", written) from e
    return written


def read_aer(source: BinaryIO, clock: ClockConfig | None = None) -> SpikeStream:
    """Inverse of write_aer up to microsecond timestamp quantization."""
    clock = clock or ClockConfig()
    data = source.read()
    if not data.startswith(HEADER_MAGIC):
        raise FormatError("missing #!AER-DAT header")
    pos = 0
    while pos < len(data) and data[pos:pos + 1] == b"#":
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise FormatError("unterminated header line")
        pos = nl + 1
    body = data[pos:]
    if len(body) % RECORD_SIZE != 0:
        raise FormatError(
            f"truncated record at event {len(body) // RECORD_SIZE}: "
            f"{len(body) % RECORD_SIZE} stray bytes")
    if not body:
        return SpikeStream.empty(clock)
    records = np.frombuffer(body, dtype=">u4").reshape(-1, 2)
    address = records[:, 0].astype(np.uint32)
    ts_us = records[:, 1].astype(np.int64)
    t_cycles = (ts_us * clock.core_clock_hz + _US // 2) // _US
    polarity = np.where(address % 2 == 1, 1, -1).astype(np.int8)
    return SpikeStream(t_cycles, polarity, address, clock, quantized=True)


@dataclass(frozen=True)
class AerSummary:
    """Per-file statistics used by the aer-info CLI command."""

    event_count: int
    duration_s: float
    counts_by_address: dict
    rates_by_address: dict


def summarize(stream: SpikeStream) -> AerSummary:
    addrs, counts = np.unique(stream.address, return_counts=True)
    dur = stream.duration_s
    counts_by = {int(a): int(c) for a, c in zip(addrs, counts)}
    rates_by = {a: (c / dur if dur > 0 else float("nan"))
                for a, c in counts_by.items()}
    return AerSummary(len(stream), dur, counts_by, rates_by)
