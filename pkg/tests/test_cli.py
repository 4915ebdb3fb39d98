import subprocess
import sys

import numpy as np
import pytest

from twradar.cli import main
from twradar.spectro import read_grid_csv

from test_config import SMALL

OUTPUTS = ("spectrogram.csv", "spectrogram.pgm", "trace.twrif", "ranges.csv", "run.txt")


@pytest.fixture
def small_scene(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return p


def _files(d):
    return {n: (d / n).read_bytes() for n in OUTPUTS}


def test_simulate_outputs(tmp_path, small_scene, capsys):
    out = tmp_path / "o"
    assert main(["simulate", "--scene", str(small_scene), "--out", str(out)]) == 0
    for n in OUTPUTS:
        assert (out / n).exists()
    text = capsys.readouterr().out
    assert "static_ridge = 2.86" in text
    g = read_grid_csv(out / "spectrogram.csv")
    assert g.shape == (20, 801)


def test_simulate_deterministic(tmp_path, small_scene):
    runs = []
    for i, workers in enumerate(("1", "1", "4")):
        out = tmp_path / f"o{i}"
        assert main(["simulate", "--scene", str(small_scene), "--out", str(out), "--seed", "3",
                     "--workers", workers]) == 0
        runs.append(_files(out))
    assert runs[0] == runs[1] == runs[2]


def test_seed_changes_noise(tmp_path, small_scene):
    for s in ("1", "2"):
        main(["simulate", "--scene", str(small_scene), "--out", str(tmp_path / s), "--seed", s])
    assert (tmp_path / "1" / "trace.twrif").read_bytes() != (tmp_path / "2" / "trace.twrif").read_bytes()


def test_analyze_reproduces_simulate(tmp_path, small_scene):
    sim, ana = tmp_path / "sim", tmp_path / "ana"
    main(["simulate", "--scene", str(small_scene), "--out", str(sim)])
    assert main(["analyze", str(sim / "trace.twrif"), "--out", str(ana)]) == 0
    for n in ("spectrogram.csv", "spectrogram.pgm", "ranges.csv"):
        assert (sim / n).read_bytes() == (ana / n).read_bytes()


def test_missing_scene_exit_2(tmp_path, capsys):
    assert main(["simulate", "--scene", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_bad_scene_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text("[radar]\nwarp = 9\n")
    assert main(["simulate", "--scene", str(p), "--out", str(tmp_path / "o")]) == 2
    assert ":2" in capsys.readouterr().err


def test_corrupt_trace_exit_2(tmp_path, capsys):
    p = tmp_path / "t.twrif"
    p.write_bytes(b"XXXXXX 1 2 3\n" + bytes(8))
    assert main(["analyze", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "offset 0" in capsys.readouterr().err


def test_model_error_exit_1(tmp_path, small_scene, capsys):
    assert main(["simulate", "--scene", str(small_scene), "--antenna", "dish",
                 "--out", str(tmp_path / "o")]) == 1
    assert "antenna" in capsys.readouterr().err


def test_validate_reports_excluded_row(capsys):
    main(["validate"])
    out = capsys.readouterr().out
    assert "excluded (inconsistent)" in out
    assert "PASS  beat-to-range inversion" in out


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    for word in ("roc-operational", "quasi-yagi", "brick-40cm", "thru-wall", "env-a.ini"):
        assert word in out


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "twradar.cli", "presets"], capture_output=True, text=True)
    assert r.returncode == 0 and "horn" in r.stdout
