import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pdmnas import ClockConfig, SpikeStream, sbpf_process
from pdmnas._kernels import (hold_and_fire_kernel, sigma_delta_kernel,
                             slpf_event_kernel)


@pytest.fixture(scope="session")
def clock() -> ClockConfig:
    return ClockConfig()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels(clock):
    """Compile the numba kernels once so timed tests measure simulation."""
    sigma_delta_kernel(np.zeros(8))
    t = np.array([0, 5, 9], np.int64)
    p = np.array([1, -1, 1], np.int8)
    slpf_event_kernel(t, p, np.int64(64), np.int64(3), np.int64(12),
                      np.int64(100), np.int64(0), np.int64(0))
    hold_and_fire_kernel(t, p, t, p, np.int64(4))
    stream = SpikeStream.from_polarities(t, p, clock)
    sbpf_process(stream, t_end=32)
