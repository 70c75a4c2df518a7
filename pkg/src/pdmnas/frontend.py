"""PDM front-end: each PDM bit becomes one single-cycle signed spike.

A '1' bit emits a positive spike, a '0' bit a negative spike, at the core
cycle where the bit is sampled. Raw front-end spikes use the debug address
pair (3 positive, 2 negative); the band-pass output downstream uses (1, 0).
Odd addresses are positive polarity throughout the package.
"""
from __future__ import annotations

import numpy as np

from .events import SpikeStream
from .stimulus import PdmStream

FRONTEND_POS_ADDR = 3
FRONTEND_NEG_ADDR = 2
SBPF_POS_ADDR = 1
SBPF_NEG_ADDR = 0


def pdm_to_raw_spikes(p: PdmStream) -> SpikeStream:
    """One spike per PDM bit: bit i maps to a spike at
    start_cycle + i * pdm_divisor with polarity 2*bit - 1."""
    n = len(p)
    t = p.start_cycle + np.arange(n, dtype=np.int64) * p.clock.pdm_divisor
    polarity = (2 * p.bits.astype(np.int16) - 1).astype(np.int8)
    address = np.where(polarity > 0, np.uint32(FRONTEND_POS_ADDR),
                       np.uint32(FRONTEND_NEG_ADDR)).astype(np.uint32)
    return SpikeStream(t, polarity, address, p.clock)
