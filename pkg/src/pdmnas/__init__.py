"""Deterministic, cycle-accurate simulator of a PDM-microphone spike
interface and a cascade spike filter bank, with an analysis suite for
zero-crossing, THD/SNR, bode, and cochleogram measurements.
"""

from .aer import read_aer, summarize, write_aer
from .analysis import (BodePoint, Cochleogram, ReconstructedWaveform,
                       bode_sweep, cochleogram, count_zero_crossings,
                       log_spaced_frequencies, measure_snr, measure_thd,
                       reconstruct_from_isi)
from .config import RunConfig, load_config
from .events import (ClockConfig, SpikeEvent, SpikeStream, merge_streams,
                     rate_of, read_csv_events, write_csv_events)
from .exceptions import AerIoError, ConfigError, FormatError, PdmNasError
from .frontend import pdm_to_raw_spikes
from .nas import NasAddressMap, NasBank, NasConfig, build_nas, nas_process
from .pipeline import measure_psi, run_nas, run_psi
from .ssp import (HoldAndFireParams, SbpfConfig, SlpfParams, SpikeGenState,
                  cutoff_to_params, hold_and_fire, sbpf_process, slpf_process)
from .stimulus import (PdmStream, Waveform, load_wav, resample_zoh,
                       sigma_delta_modulate, synth_sine)

__version__ = "0.1.0"

__all__ = [
    "AerIoError", "BodePoint", "ClockConfig", "Cochleogram", "ConfigError",
    "FormatError", "HoldAndFireParams", "NasAddressMap", "NasBank",
    "NasConfig", "PdmNasError", "PdmStream", "ReconstructedWaveform",
    "RunConfig", "SbpfConfig", "SlpfParams", "SpikeEvent", "SpikeGenState",
    "SpikeStream", "Waveform", "bode_sweep", "build_nas", "cochleogram",
    "count_zero_crossings", "cutoff_to_params", "hold_and_fire",
    "load_config", "load_wav", "log_spaced_frequencies", "measure_psi",
    "measure_snr", "measure_thd", "merge_streams", "nas_process",
    "pdm_to_raw_spikes", "rate_of", "read_aer", "read_csv_events",
    "reconstruct_from_isi", "resample_zoh", "run_nas", "run_psi",
    "sbpf_process", "sigma_delta_modulate", "slpf_process", "summarize",
    "synth_sine", "write_aer", "write_csv_events",
]
