"""Run configuration: an INI-style key-value file with strict validation.

Sections and keys:

  [clock]    core_clock_hz, pdm_divisor
  [psi]      f_low_hz, f_high_hz, hold_cycles
  [nas]      num_channels, f_start_hz, f_end_hz, binaural
  [analysis] bin_ms, analysis_rate_hz, full_scale_rate
  [io]       input, output_dir, formats

Unknown sections or keys are rejected by name. Values are validated
against the owning module's invariants at load time.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import DEFAULT_ANALYSIS_RATE_HZ, DEFAULT_BIN_MS
from .events import ClockConfig
from .exceptions import ConfigError
from .nas import NasConfig, build_nas
from .ssp import DEFAULT_HOLD_CYCLES, HoldAndFireParams, SbpfConfig, cutoff_to_params

VALID_FORMATS = ("aer", "csv", "png")

_SCHEMA = {
    "clock": {"core_clock_hz", "pdm_divisor"},
    "psi": {"f_low_hz", "f_high_hz", "hold_cycles"},
    "nas": {"num_channels", "f_start_hz", "f_end_hz", "binaural"},
    "analysis": {"bin_ms", "analysis_rate_hz", "full_scale_rate"},
    "io": {"input", "output_dir", "formats"},
}


@dataclass(frozen=True)
class RunConfig:
    clock: ClockConfig = field(default_factory=ClockConfig)
    psi_band: SbpfConfig = field(default_factory=SbpfConfig)
    hold: HoldAndFireParams = field(default_factory=HoldAndFireParams)
    nas: NasConfig = field(default_factory=NasConfig)
    bin_ms: float = DEFAULT_BIN_MS
    analysis_rate_hz: float = DEFAULT_ANALYSIS_RATE_HZ
    full_scale_rate: float | None = None  # None: PDM clock rate
    input: str | None = None
    output_dir: str = "out"
    formats: tuple[str, ...] = VALID_FORMATS

    def effective_full_scale_rate(self) -> float:
        if self.full_scale_rate is not None:
            return self.full_scale_rate
        return self.clock.pdm_clock_hz


def _get(parser, section, key, conv, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        if conv is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return conv(raw)
    except ValueError as e:
        raise ConfigError(f"[{section}] {key}: {e}") from e


def load_config(path: str | Path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
    try:
        clock = ClockConfig(
            core_clock_hz=_get(parser, "clock", "core_clock_hz", int,
                               ClockConfig().core_clock_hz),
            pdm_divisor=_get(parser, "clock", "pdm_divisor", int,
                             ClockConfig().pdm_divisor))
        psi_band = SbpfConfig(
            f_low_hz=_get(parser, "psi", "f_low_hz", float, SbpfConfig().f_low_hz),
            f_high_hz=_get(parser, "psi", "f_high_hz", float,
                           SbpfConfig().f_high_hz))
        hold = HoldAndFireParams(
            _get(parser, "psi", "hold_cycles", int, DEFAULT_HOLD_CYCLES))
        nas = NasConfig(
            num_channels=_get(parser, "nas", "num_channels", int, 64),
            f_start_hz=_get(parser, "nas", "f_start_hz", float, 20000.0),
            f_end_hz=_get(parser, "nas", "f_end_hz", float, 20.0),
            binaural=_get(parser, "nas", "binaural", bool, False),
            hold_cycles=_get(parser, "psi", "hold_cycles", int,
                             DEFAULT_HOLD_CYCLES),
            clock=clock)
    except (ValueError, ConfigError) as e:
        raise ConfigError(str(e)) from e

    # fail early on unrealizable filter settings
    try:
        cutoff_to_params(psi_band.f_low_hz, clock.core_clock_hz)
        cutoff_to_params(psi_band.f_high_hz, clock.core_clock_hz)
        build_nas(nas)
    except (ValueError, ConfigError) as e:
        raise ConfigError(str(e)) from e

    bin_ms = _get(parser, "analysis", "bin_ms", float, DEFAULT_BIN_MS)
    if bin_ms <= 0:
        raise ConfigError("[analysis] bin_ms must be positive")
    analysis_rate = _get(parser, "analysis", "analysis_rate_hz", float,
                         DEFAULT_ANALYSIS_RATE_HZ)
    if analysis_rate <= 0:
        raise ConfigError("[analysis] analysis_rate_hz must be positive")
    full_scale = _get(parser, "analysis", "full_scale_rate", float, None)
    if full_scale is not None and full_scale <= 0:
        raise ConfigError("[analysis] full_scale_rate must be positive")

    formats_raw = _get(parser, "io", "formats", str, ",".join(VALID_FORMATS))
    formats = tuple(f.strip() for f in formats_raw.split(",") if f.strip())
    for f in formats:
        if f not in VALID_FORMATS:
            raise ConfigError(f"[io] formats: unknown format '{f}' "
                              f"(valid: {', '.join(VALID_FORMATS)})")

    return RunConfig(
        clock=clock, psi_band=psi_band, hold=hold, nas=nas, bin_ms=bin_ms,
        analysis_rate_hz=analysis_rate, full_scale_rate=full_scale,
        input=_get(parser, "io", "input", str, None),
        output_dir=_get(parser, "io", "output_dir", str, "out"),
        formats=formats)
