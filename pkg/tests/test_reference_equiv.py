"""Differential tests: the event-driven kernels must match the per-cycle
references bit for bit (timestamps, polarities, and final state)."""
import numpy as np

from pdmnas import (HoldAndFireParams, SbpfConfig, SlpfParams, SpikeStream,
                    hold_and_fire, sbpf_process, slpf_process)
from pdmnas.reference import (hold_and_fire_reference, sbpf_process_reference,
                              slpf_process_reference)

from helpers import random_stream


def assert_streams_identical(a: SpikeStream, b: SpikeStream):
    assert np.array_equal(a.t, b.t)
    assert np.array_equal(a.polarity, b.polarity)
    assert np.array_equal(a.address, b.address)


def random_slpf_params(rng) -> SlpfParams:
    return SlpfParams(cutoff_hz=0.0,
                      gain=int(rng.integers(1, 200)),
                      n_bits=int(rng.integers(10, 16)),
                      integrator_limit=int(rng.integers(4, 64)))


class TestSlpfEquivalence:
    def test_randomized(self, clock):
        rng = np.random.default_rng(42)
        for case in range(30):
            stream = random_stream(rng, clock, max_t=1500, max_events=80)
            params = random_slpf_params(rng)
            t_end = int(rng.integers(1500, 2500)) if rng.random() < 0.7 else None
            fast, fstats = slpf_process(stream, params, t_end, with_stats=True)
            ref, rstats = slpf_process_reference(stream, params, t_end,
                                                 with_stats=True)
            assert_streams_identical(fast, ref)
            assert fstats == rstats

    def test_dense_input(self, clock):
        # every cycle carries a spike: exercises the per-event path
        rng = np.random.default_rng(1)
        t = np.arange(600, dtype=np.int64)
        pol = rng.choice(np.array([-1, 1], np.int8), 600)
        stream = SpikeStream.from_polarities(t, pol, clock)
        params = SlpfParams(0.0, gain=7, n_bits=10, integrator_limit=20)
        fast, fs = slpf_process(stream, params, 700, with_stats=True)
        ref, rs = slpf_process_reference(stream, params, 700, with_stats=True)
        assert_streams_identical(fast, ref)
        assert fs == rs

    def test_saturating_case(self, clock):
        # all-positive pile-up forces integrator clamps and generator
        # saturation in both implementations
        t = np.arange(300, dtype=np.int64)
        stream = SpikeStream.from_polarities(t, np.ones(300, np.int8), clock)
        params = SlpfParams(0.0, gain=5000, n_bits=10, integrator_limit=10)
        fast, fs = slpf_process(stream, params, 400, with_stats=True)
        ref, rs = slpf_process_reference(stream, params, 400, with_stats=True)
        assert_streams_identical(fast, ref)
        assert fs == rs
        assert fs.generator_saturations > 0

    def test_quiescence_mode(self, clock):
        rng = np.random.default_rng(3)
        for _ in range(5):
            stream = random_stream(rng, clock, max_t=800, max_events=40)
            params = random_slpf_params(rng)
            fast = slpf_process(stream, params, None)
            ref = slpf_process_reference(stream, params, None)
            assert_streams_identical(fast, ref)

    def test_events_at_and_past_horizon_ignored(self, clock):
        # inputs at t >= t_end must not touch the state in either version
        stream = SpikeStream.from_polarities(
            np.array([10, 500, 1000, 1001, 1500], np.int64),
            np.array([1, 1, 1, -1, 1], np.int8), clock)
        params = SlpfParams(0.0, gain=40, n_bits=12, integrator_limit=100)
        for t_end in (1000, 1001, 999, 1500, 2000):
            fast, fs = slpf_process(stream, params, t_end, with_stats=True)
            ref, rs = slpf_process_reference(stream, params, t_end,
                                             with_stats=True)
            assert_streams_identical(fast, ref)
            assert fs == rs


class TestHoldAndFireEquivalence:
    def test_randomized(self, clock):
        rng = np.random.default_rng(77)
        for case in range(30):
            a = random_stream(rng, clock, max_t=1200, max_events=90)
            b = random_stream(rng, clock, max_t=1200, max_events=90)
            params = HoldAndFireParams(int(rng.integers(1, 300)))
            fast, fs = hold_and_fire(a, b, params, with_stats=True)
            ref, rs = hold_and_fire_reference(a, b, params, with_stats=True)
            assert_streams_identical(fast, ref)
            assert fs == rs

    def test_shared_timestamps(self, clock):
        # many coincident arrivals exercise collapse and same-cycle ordering
        rng = np.random.default_rng(5)
        t = np.sort(rng.choice(200, 80, replace=False)).astype(np.int64)
        a = SpikeStream.from_polarities(
            t, rng.choice(np.array([-1, 1], np.int8), 80), clock)
        b = SpikeStream.from_polarities(
            t, rng.choice(np.array([-1, 1], np.int8), 80), clock)
        for hold in (1, 3, 16, 64):
            fast, fs = hold_and_fire(a, b, HoldAndFireParams(hold),
                                     with_stats=True)
            ref, rs = hold_and_fire_reference(a, b, HoldAndFireParams(hold),
                                              with_stats=True)
            assert_streams_identical(fast, ref)
            assert fs == rs


class TestSbpfEquivalence:
    def test_randomized(self, clock):
        rng = np.random.default_rng(99)
        for case in range(10):
            stream = random_stream(rng, clock, max_t=1000, max_events=120)
            config = SbpfConfig(f_low_hz=float(rng.uniform(50, 200)),
                                f_high_hz=float(rng.uniform(5000, 15000)))
            hf = HoldAndFireParams(int(rng.integers(1, 128)))
            t_end = 1200
            fast = sbpf_process(stream, config, hf, t_end=t_end)
            ref = sbpf_process_reference(stream, config, hf, t_end=t_end)
            assert_streams_identical(fast, ref)
