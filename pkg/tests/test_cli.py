import wave as wave_mod
from pathlib import Path

import numpy as np
import pytest

from pdmnas import read_aer
from pdmnas.cli import main, parse_sine_spec


def run_cli(*argv):
    return main(list(argv))


def write_stereo_wav(path: Path, seconds=0.05, rate=48_000, freq=700.0):
    n = int(seconds * rate)
    t = np.arange(n) / rate
    left = (0.6 * np.sin(2 * np.pi * freq * t) * 32767).astype("<i2")
    right = left.copy()
    frames = np.stack([left, right], axis=1)
    with wave_mod.open(str(path), "wb") as wf:
        wf.setnchannels(2)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(frames.tobytes())


def read_all_bytes(directory: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestSineSpec:
    def test_parse_variants(self):
        assert parse_sine_spec("500,0.5,1s") == (500.0, 0.5, 1.0)
        assert parse_sine_spec("1000,1,250ms") == (1000.0, 1.0, 0.25)
        assert parse_sine_spec("20,0.1,0.5") == (20.0, 0.1, 0.5)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            parse_sine_spec("500,0.5")


class TestPsiCommand:
    def test_writes_all_products(self, tmp_path, capsys):
        rc = run_cli("psi", "--sine", "500,0.5,50ms", "--out", str(tmp_path))
        assert rc == 0
        for name in ("psi.aer", "psi_events.csv", "reconstruction.csv",
                     "metrics.txt", "reconstruction.png", "spikes.png"):
            assert (tmp_path / name).exists(), name
        metrics = dict(line.split("=") for line in
                       (tmp_path / "metrics.txt").read_text().splitlines())
        assert int(metrics["zero_crossings_output"]) > 0
        out = capsys.readouterr().out
        assert "zero_crossings_output" in out

    def test_deterministic_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("psi", "--sine", "500,0.5,50ms", "--out", str(a)) == 0
        assert run_cli("psi", "--sine", "500,0.5,50ms", "--out", str(b)) == 0
        files_a, files_b = read_all_bytes(a), read_all_bytes(b)
        assert files_a.keys() == files_b.keys()
        for name in files_a:
            assert files_a[name] == files_b[name], f"{name} differs"

    def test_zero_amplitude_near_silent(self, tmp_path):
        rc = run_cli("psi", "--sine", "500,0,50ms", "--out", str(tmp_path))
        assert rc == 0
        metrics = dict(line.split("=") for line in
                       (tmp_path / "metrics.txt").read_text().splitlines())
        assert int(metrics["output_events"]) < 2000
        assert int(metrics["zero_crossings_frontend"]) > 10_000

    def test_aer_contains_all_address_pairs(self, tmp_path):
        run_cli("psi", "--sine", "500,0.5,50ms", "--out", str(tmp_path))
        with open(tmp_path / "psi.aer", "rb") as f:
            stream = read_aer(f)
        assert set(np.unique(stream.address)) == {0, 1, 2, 3}

    def test_requires_exactly_one_input(self, tmp_path, capsys):
        assert run_cli("psi", "--out", str(tmp_path)) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_wav_reports_error(self, tmp_path, capsys):
        rc = run_cli("psi", "--wav", str(tmp_path / "missing.wav"),
                     "--out", str(tmp_path))
        assert rc == 2


class TestSweepCommand:
    def test_small_sweep(self, tmp_path):
        rc = run_cli("sweep", "--f-min", "200", "--f-max", "2000",
                     "--points-per-decade", "2", "--out", str(tmp_path))
        assert rc == 0
        lines = (tmp_path / "bode.csv").read_text().splitlines()
        assert lines[0] == "freq_hz,gain_db,phase_rad"
        assert len(lines) == 1 + 3  # 2 * log10(10) + 1 points
        assert (tmp_path / "bode.png").exists()

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run_cli("sweep", "--f-min", "500", "--f-max", "5000",
                           "--points-per-decade", "1", "--out", str(d)) == 0
        assert (a / "bode.csv").read_bytes() == (b / "bode.csv").read_bytes()
        assert (a / "bode.png").read_bytes() == (b / "bode.png").read_bytes()

    def test_thread_override_same_result(self, tmp_path, monkeypatch):
        serial, threaded = tmp_path / "serial", tmp_path / "threaded"
        assert run_cli("sweep", "--f-min", "300", "--f-max", "3000",
                       "--points-per-decade", "1", "--out", str(serial)) == 0
        monkeypatch.setenv("PDMNAS_THREADS", "4")
        assert run_cli("sweep", "--f-min", "300", "--f-max", "3000",
                       "--points-per-decade", "1", "--out", str(threaded)) == 0
        assert (serial / "bode.csv").read_bytes() == \
            (threaded / "bode.csv").read_bytes()


class TestNasCommand:
    CONFIG = """
[nas]
num_channels = 8
f_start_hz = 4000
f_end_hz = 200
"""

    def test_mono_products(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text(self.CONFIG)
        out = tmp_path / "out"
        rc = run_cli("nas", "--config", str(cfg), "--sine", "1000,0.8,40ms",
                     "--out", str(out))
        assert rc == 0
        for name in ("nas.aer", "cochleogram.csv", "sonogram.csv",
                     "cochleogram.png", "sonogram.png"):
            assert (out / name).exists(), name
        rows = (out / "cochleogram.csv").read_text().splitlines()
        assert len(rows) == 8
        with open(out / "nas.aer", "rb") as f:
            stream = read_aer(f)
        total = sum(int(c) for row in rows for c in row.split(","))
        assert total == len(stream)

    def test_binaural_requires_stereo(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text(self.CONFIG + "binaural = true\n")
        rc = run_cli("nas", "--config", str(cfg), "--sine", "1000,0.8,40ms",
                     "--out", str(tmp_path / "out"))
        assert rc == 2
        assert "stereo" in capsys.readouterr().err

    def test_binaural_stereo_wav(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text(self.CONFIG + "binaural = true\n")
        wav = tmp_path / "in.wav"
        write_stereo_wav(wav)
        out = tmp_path / "out"
        rc = run_cli("nas", "--config", str(cfg), "--wav", str(wav),
                     "--out", str(out))
        assert rc == 0
        for name in ("cochleogram_left.csv", "cochleogram_right.csv",
                     "sonogram_left.csv", "sonogram_right.csv"):
            assert (out / name).exists(), name
        left = (out / "cochleogram_left.csv").read_text()
        right = (out / "cochleogram_right.csv").read_text()
        assert left == right  # identical input in both ears

    def test_speech_like_wav_activates_mid_channels(self, tmp_path):
        # voiced-speech stand-in (tone mixture, 250-1800 Hz fundamentals):
        # the bulk of bank activity lands in channels centered 200 Hz-5 kHz
        rate = 48_000
        n = int(0.08 * rate)
        t = np.arange(n) / rate
        x = (0.4 * np.sin(2 * np.pi * 250 * t)
             + 0.3 * np.sin(2 * np.pi * 800 * t)
             + 0.2 * np.sin(2 * np.pi * 1800 * t))
        wav = tmp_path / "speechish.wav"
        with wave_mod.open(str(wav), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(rate)
            wf.writeframes((x * 32767 / np.max(np.abs(x))).astype("<i2").tobytes())
        cfg = tmp_path / "run.ini"
        cfg.write_text("[nas]\nnum_channels = 24\nf_start_hz = 16000\n"
                       "f_end_hz = 50\n")
        out = tmp_path / "out"
        assert run_cli("nas", "--config", str(cfg), "--wav", str(wav),
                       "--out", str(out)) == 0
        rows = [[int(c) for c in row.split(",")] for row in
                (out / "cochleogram.csv").read_text().splitlines()]
        counts = np.array([sum(r) for r in rows], dtype=np.float64)
        cuts = 16_000.0 * (50.0 / 16_000.0) ** (np.arange(25) / 24)
        centers = np.sqrt(cuts[:-1] * cuts[1:])
        mid = (centers >= 200.0) & (centers <= 5000.0)
        assert counts[mid].sum() >= 0.6 * counts.sum()


class TestConfig:
    def test_unknown_key_named(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[clock]\nfrequency = 1000\n")
        rc = run_cli("psi", "--config", str(cfg), "--sine", "500,0.5,10ms",
                     "--out", str(tmp_path))
        assert rc == 2
        assert "frequency" in capsys.readouterr().err

    def test_unknown_section_named(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[sound]\nvolume = 11\n")
        rc = run_cli("psi", "--config", str(cfg), "--sine", "500,0.5,10ms",
                     "--out", str(tmp_path))
        assert rc == 2
        assert "sound" in capsys.readouterr().err

    def test_invalid_value_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[clock]\npdm_divisor = 3\n")
        rc = run_cli("psi", "--config", str(cfg), "--sine", "500,0.5,10ms",
                     "--out", str(tmp_path))
        assert rc == 2

    def test_full_config_honored(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("""
[clock]
core_clock_hz = 50000000
pdm_divisor = 16

[psi]
f_low_hz = 100
f_high_hz = 10000
hold_cycles = 512

[nas]
num_channels = 4
f_start_hz = 2000
f_end_hz = 200

[analysis]
bin_ms = 10
analysis_rate_hz = 50000
full_scale_rate = 3125000

[io]
input = sine:800,0.5,30ms
output_dir = {out}
formats = csv
""".format(out=tmp_path / "cfgout"))
        rc = run_cli("psi", "--config", str(cfg))
        assert rc == 0
        out = tmp_path / "cfgout"
        assert (out / "reconstruction.csv").exists()
        assert not (out / "psi.aer").exists()       # aer not in formats
        assert not (out / "reconstruction.png").exists()


class TestAerInfo:
    def test_prints_summary(self, tmp_path, capsys):
        run_cli("psi", "--sine", "500,0.5,20ms", "--out", str(tmp_path))
        capsys.readouterr()
        rc = run_cli("aer-info", str(tmp_path / "psi.aer"))
        assert rc == 0
        out = capsys.readouterr().out
        assert "events:" in out
        assert "address 3:" in out
        assert "duration_s:" in out

    def test_missing_file(self, tmp_path, capsys):
        assert run_cli("aer-info", str(tmp_path / "nope.aer")) == 2
