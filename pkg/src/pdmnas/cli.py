"""Command-line interface.

Subcommands:
  psi       full chain on a sine or WAV input; writes AER + event CSV +
            reconstruction CSV + metrics, renders figures, prints metrics
  sweep     logarithmic frequency sweep of the chain; writes the bode CSV
            and figure
  nas       full chain through the filter bank; writes AER + cochleogram
            and sonogram CSVs, renders figures
  aer-info  prints event count, duration and per-address rates of an AER file

Outputs are written atomically (temp file + rename) and are byte-identical
across reruns of the same command. PDMNAS_THREADS overrides the worker
count used by the sweep.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import aer
from .analysis import bode_sweep, cochleogram, log_spaced_frequencies
from .config import RunConfig, load_config
from .events import write_csv_events
from .exceptions import PdmNasError
from .pipeline import measure_psi, run_nas, run_psi
from .ssp import sbpf_process
from .stimulus import Waveform, load_wav, synth_sine

PROG = "pdmnas"


def fmt(x) -> str:
    """Fixed 6-significant-digit formatting for reproducible text output."""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _atomic_write(path: Path, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            writer(f)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path: Path, text: str) -> None:
    _atomic_write(path, lambda f: f.write(text.encode()))


def parse_sine_spec(spec: str) -> tuple[float, float, float]:
    """'freq,amplitude,duration' with duration in seconds ('1s', '200ms',
    or a bare number)."""
    parts = spec.split(",")
    if len(parts) != 3:
        raise ValueError(f"sine spec must be freq,amplitude,duration: {spec!r}")
    freq = float(parts[0])
    amp = float(parts[1])
    dur_str = parts[2].strip().lower()
    if dur_str.endswith("ms"):
        dur = float(dur_str[:-2]) / 1000.0
    elif dur_str.endswith("s"):
        dur = float(dur_str[:-1])
    else:
        dur = float(dur_str)
    return freq, amp, dur


def _load_input(args, config: RunConfig) -> list[Waveform]:
    """Resolve --sine/--wav (or [io] input) into per-channel waveforms."""
    sine = getattr(args, "sine", None)
    wav = getattr(args, "wav", None)
    if sine is None and wav is None and config.input:
        if config.input.startswith("sine:"):
            sine = config.input[len("sine:"):]
        else:
            wav = config.input
    if (sine is None) == (wav is None):
        raise ValueError("exactly one input is required: --sine or --wav "
                         "(or [io] input in the config)")
    if sine is not None:
        freq, amp, dur = parse_sine_spec(sine)
        wave = synth_sine(freq, amp, dur, config.clock.pdm_clock_hz) \
            if amp > 0 else Waveform(
                np.zeros(int(round(dur * config.clock.pdm_clock_hz))),
                config.clock.pdm_clock_hz)
        return [wave]
    with open(wav, "rb") as f:
        return load_wav(f)


def _config_from_args(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return RunConfig()


def _threads() -> int:
    raw = os.environ.get("PDMNAS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_psi(args) -> int:
    config = _config_from_args(args)
    waves = _load_input(args, config)
    wave = waves[0]
    sine_f0 = None
    if getattr(args, "sine", None):
        sine_f0 = parse_sine_spec(args.sine)[0]
        if parse_sine_spec(args.sine)[1] == 0:
            sine_f0 = None
    run = run_psi(config, wave)
    metrics, rec_front, rec_out = measure_psi(run, config, sine_f0)

    out_dir = Path(args.out or config.output_dir)
    formats = config.formats
    if "aer" in formats:
        _atomic_write(out_dir / "psi.aer", lambda f: aer.write_aer(run.merged, f))
    if "csv" in formats:
        buf = io.StringIO()
        write_csv_events(run.merged, buf)
        _atomic_write_text(out_dir / "psi_events.csv", buf.getvalue())
        lines = ["t_s,value"]
        times = rec_out.times()
        lines += [f"{fmt(float(t))},{fmt(float(v))}"
                  for t, v in zip(times, rec_out.samples)]
        _atomic_write_text(out_dir / "reconstruction.csv", "\n".join(lines) + "\n")
    metric_lines = [
        f"zero_crossings_frontend={metrics.zero_crossings_frontend}",
        f"zero_crossings_output={metrics.zero_crossings_output}",
        f"thd_db={fmt(metrics.thd_db)}",
        f"snr_db={fmt(metrics.snr_db)}",
        f"fundamental_hz={fmt(metrics.fundamental_hz)}",
        f"fundamental_is_peak={str(metrics.fundamental_is_peak).lower()}",
        f"frontend_events={len(run.front_end)}",
        f"output_events={len(run.output)}",
    ]
    _atomic_write_text(out_dir / "metrics.txt", "\n".join(metric_lines) + "\n")
    if "png" in formats:
        from . import report
        report.render_reconstruction(rec_front, rec_out,
                                     out_dir / "reconstruction.png")
        report.render_raster(run.merged, out_dir / "spikes.png")
    for line in metric_lines:
        print(line)
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    freqs = log_spaced_frequencies(args.f_min, args.f_max,
                                   args.points_per_decade)
    band = config.psi_band
    hold = config.hold

    def system(front):
        t_end = int(front.t[-1]) + front.clock.pdm_divisor if len(front) else 0
        return sbpf_process(front, band, hold, t_end=t_end)

    points = bode_sweep(system, freqs, amplitude=args.amplitude,
                        clock=config.clock,
                        analysis_rate_hz=config.analysis_rate_hz,
                        full_scale_rate=config.effective_full_scale_rate(),
                        threads=_threads())
    out_dir = Path(args.out or config.output_dir)
    lines = ["freq_hz,gain_db,phase_rad"]
    lines += [f"{fmt(p.freq_hz)},{fmt(p.gain_db)},{fmt(p.phase_rad)}"
              for p in points]
    _atomic_write_text(out_dir / "bode.csv", "\n".join(lines) + "\n")
    if "png" in config.formats:
        from . import report
        report.render_bode(points, out_dir / "bode.png")
    print(f"wrote {len(points)} sweep points to {out_dir / 'bode.csv'}")
    return 0


def cmd_nas(args) -> int:
    config = _config_from_args(args)
    waves = _load_input(args, config)
    if config.nas.binaural and len(waves) == 1:
        raise ValueError("binaural bank requires a stereo input")
    if not config.nas.binaural and len(waves) == 2:
        waves = waves[:1]
    run = run_nas(config, waves)
    out_dir = Path(args.out or config.output_dir)
    if "aer" in config.formats:
        _atomic_write(out_dir / "nas.aer", lambda f: aer.write_aer(run.events, f))
    duration_s = run.duration_cycles / config.clock.core_clock_hz
    grams = cochleogram(run.events, config.nas, config.bin_ms, duration_s)
    suffixes = ["_left", "_right"] if config.nas.binaural else [""]
    for gram, suffix in zip(grams, suffixes):
        if "csv" in config.formats:
            count_rows = "\n".join(",".join(str(int(c)) for c in row)
                                   for row in gram.counts)
            _atomic_write_text(out_dir / f"cochleogram{suffix}.csv",
                               count_rows + "\n")
            rate_rows = "\n".join(",".join(fmt(float(c)) for c in row)
                                  for row in gram.rates())
            _atomic_write_text(out_dir / f"sonogram{suffix}.csv",
                               rate_rows + "\n")
        if "png" in config.formats:
            from . import report
            report.render_cochleogram(gram, out_dir / f"cochleogram{suffix}.png")
            report.render_cochleogram(gram, out_dir / f"sonogram{suffix}.png",
                                      as_rates=True)
    print(f"nas events: {len(run.events)}")
    for gram, suffix in zip(grams, suffixes):
        label = suffix.lstrip("_") or "mono"
        print(f"cochleogram[{label}]: {gram.counts.shape[0]} channels x "
              f"{gram.counts.shape[1]} bins, {gram.total_events} events")
    return 0


def cmd_aer_info(args) -> int:
    config = _config_from_args(args)
    with open(args.file, "rb") as f:
        stream = aer.read_aer(f, config.clock)
    info = aer.summarize(stream)
    print(f"events: {info.event_count}")
    print(f"duration_s: {fmt(info.duration_s)}")
    for addr in sorted(info.counts_by_address):
        rate = info.rates_by_address[addr]
        print(f"address {addr}: count={info.counts_by_address[addr]} "
              f"rate_hz={fmt(rate)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="PDM-to-spikes interface and auditory filter-bank simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="run configuration file (INI)")
        p.add_argument("--out", help="output directory (default from config)")

    p_psi = sub.add_parser("psi", help="run the PDM front-end + band-pass chain")
    add_common(p_psi)
    p_psi.add_argument("--sine", help="inline tone: freq,amplitude,duration")
    p_psi.add_argument("--wav", help="input WAV file (PCM-16)")
    p_psi.set_defaults(func=cmd_psi)

    p_sweep = sub.add_parser("sweep", help="bode sweep of the chain")
    add_common(p_sweep)
    p_sweep.add_argument("--f-min", type=float, default=20.0)
    p_sweep.add_argument("--f-max", type=float, default=20000.0)
    p_sweep.add_argument("--points-per-decade", type=int, default=10)
    p_sweep.add_argument("--amplitude", type=float, default=0.5)
    p_sweep.set_defaults(func=cmd_sweep)

    p_nas = sub.add_parser("nas", help="run the filter bank")
    add_common(p_nas)
    p_nas.add_argument("--sine", help="inline tone: freq,amplitude,duration")
    p_nas.add_argument("--wav", help="input WAV file (PCM-16)")
    p_nas.set_defaults(func=cmd_nas)

    p_info = sub.add_parser("aer-info", help="summarize an AER event file")
    p_info.add_argument("file")
    p_info.add_argument("--config", help="run configuration file (INI)")
    p_info.set_defaults(func=cmd_aer_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PdmNasError, ValueError, OSError) as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
