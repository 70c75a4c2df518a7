import numpy as np
import pytest

from pdmnas import PdmStream, pdm_to_raw_spikes, rate_of
from pdmnas.frontend import FRONTEND_NEG_ADDR, FRONTEND_POS_ADDR


def test_all_ones_bits(clock):
    s = pdm_to_raw_spikes(PdmStream(np.array([1, 1, 1], np.uint8), clock))
    assert s.t.tolist() == [0, 16, 32]
    assert s.polarity.tolist() == [1, 1, 1]
    assert np.all(s.address == FRONTEND_POS_ADDR)


def test_empty_bits(clock):
    assert len(pdm_to_raw_spikes(PdmStream(np.array([], np.uint8), clock))) == 0


def test_alternating_bits_constant_isi(clock):
    s = pdm_to_raw_spikes(PdmStream(np.array([1, 0, 1, 0], np.uint8), clock))
    assert s.polarity.tolist() == [1, -1, 1, -1]
    assert s.address.tolist() == [FRONTEND_POS_ADDR, FRONTEND_NEG_ADDR,
                                  FRONTEND_POS_ADDR, FRONTEND_NEG_ADDR]
    assert np.all(np.diff(s.t) == clock.pdm_divisor)


def test_event_count_equals_bit_count(clock):
    rng = np.random.default_rng(2)
    bits = rng.integers(0, 2, 5000).astype(np.uint8)
    s = pdm_to_raw_spikes(PdmStream(bits, clock))
    assert len(s) == bits.size


def test_start_cycle_offset(clock):
    s = pdm_to_raw_spikes(PdmStream(np.array([1, 1], np.uint8), clock,
                                    start_cycle=100))
    assert s.t.tolist() == [100, 116]


def test_net_rate_matches_bit_density(clock):
    # information-lossless: net rate over a window equals
    # pdm_clock * mean(2*bit - 1) over that window
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, 31_250).astype(np.uint8)  # 10 ms
    s = pdm_to_raw_spikes(PdmStream(bits, clock))
    expected = clock.pdm_clock_hz * float(2.0 * bits.mean() - 1.0)
    assert rate_of(s, (0.0, 0.01)) == pytest.approx(expected, rel=1e-9)


def test_parity_convention(clock):
    # odd addresses positive, even negative
    assert FRONTEND_POS_ADDR % 2 == 1
    assert FRONTEND_NEG_ADDR % 2 == 0
    assert FRONTEND_POS_ADDR == 3 and FRONTEND_NEG_ADDR == 2
