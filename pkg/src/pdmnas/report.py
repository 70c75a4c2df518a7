"""Figure rendering for the CLI report paths.

Every command that writes delimited output also renders the matching
matplotlib figure next to it. Rendering is deterministic (fixed sizes,
no timestamps), so repeated runs produce identical PNG bytes.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import BodePoint, Cochleogram, ReconstructedWaveform
from .events import SpikeStream

_DPI = 120


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_reconstruction(front: ReconstructedWaveform,
                          output: ReconstructedWaveform,
                          path: Path, max_seconds: float = 0.02) -> None:
    """Overlay the raw front-end reconstruction (green) with the band-pass
    output reconstruction (blue) over the first few cycles."""
    fig, ax = plt.subplots(figsize=(8, 4))
    n = min(front.samples.size, int(max_seconds * front.sample_rate_hz))
    n = max(n, 2)
    ax.plot(front.times()[:n] * 1000.0, front.samples[:n],
            color="tab:green", linewidth=0.6, label="front-end")
    m = min(output.samples.size, int(max_seconds * output.sample_rate_hz))
    ax.plot(output.times()[:m] * 1000.0, output.samples[:m],
            color="tab:blue", linewidth=1.0, label="band-pass output")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("normalized rate")
    ax.set_ylim(-1.05, 1.05)
    ax.legend(loc="upper right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_raster(stream: SpikeStream, path: Path,
                  max_seconds: float = 0.01, max_events: int = 200_000) -> None:
    """Address-vs-time scatter of the first slice of a stream."""
    fig, ax = plt.subplots(figsize=(8, 3))
    core = stream.clock.core_clock_hz
    end = int(max_seconds * core)
    sl = stream.time_slice(0, end)
    t = sl.t[:max_events] / core * 1000.0
    a = sl.address[:max_events]
    ax.scatter(t, a, s=0.5, marker="|", color="black")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("address")
    if len(sl):
        ax.set_yticks(np.unique(a))
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_bode(points: list[BodePoint], path: Path) -> None:
    """Gain (top) and phase (bottom) on a log frequency axis."""
    freqs = [p.freq_hz for p in points]
    gains = [p.gain_db for p in points]
    phases = [p.phase_rad for p in points]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.semilogx(freqs, gains, marker="o", markersize=3)
    ax1.set_ylabel("gain (dB)")
    ax1.grid(True, which="both", alpha=0.3)
    ax2.semilogx(freqs, phases, marker="o", markersize=3, color="tab:orange")
    ax2.set_ylabel("phase (rad)")
    ax2.set_xlabel("frequency (Hz)")
    ax2.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_cochleogram(gram: Cochleogram, path: Path,
                       as_rates: bool = False) -> None:
    """Channel by time-bin heat map of event counts (or rates)."""
    data = gram.rates() if as_rates else gram.counts.astype(np.float64)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    extent = (0.0, data.shape[1] * gram.bin_ms / 1000.0,
              data.shape[0] - 0.5, -0.5)
    im = ax.imshow(data, aspect="auto", extent=extent, cmap="viridis",
                   interpolation="nearest")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("channel (low index = high frequency)")
    fig.colorbar(im, ax=ax,
                 label="rate (spikes/s)" if as_rates else "events per bin")
    fig.tight_layout()
    _save(fig, path)
