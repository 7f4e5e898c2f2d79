import json
import struct
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solitonlab import io
from solitonlab.cli import main
from solitonlab.config import StudyConfig, dump_config, load_config, parse_config
from solitonlab.errors import InvalidParamsError
from solitonlab.grid import GridSpec

FAST = ["--set", "epsilons = 0.05, 0.025, 0.0125", "--set", "prefactor = 0.2"]


def test_parse_comments_and_lists():
    cfg = parse_config("""
        # sweep
        epsilons = 0.1 0.05, 0.02   # mixed separators
        seed = 7
        lambda_kind = random_step
    """)
    assert cfg.epsilons == (0.1, 0.05, 0.02)
    assert cfg.seed == 7 and cfg.lambda_kind == "random_step"
    assert cfg.dt == StudyConfig().dt


@pytest.mark.parametrize("text", ["bogus = 1", "seed = seven", "just words"])
def test_parse_errors(text):
    with pytest.raises(InvalidParamsError):
        parse_config(text)


@given(seed=st.integers(0, 2 ** 31), pref=st.floats(0.01, 100), eps=st.lists(st.floats(1e-4, 0.5), min_size=1, max_size=5))
def test_config_round_trip(seed, pref, eps):
    cfg = StudyConfig(seed=seed, prefactor=pref, epsilons=tuple(eps))
    assert parse_config(dump_config(cfg)) == cfg


def test_load_config(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("alpha = 0.9\nbeta = 0.5\nnu = 0.1\n", encoding="utf-8")
    assert load_config(p).alpha == 0.9


def test_trajectory_round_trip(tmp_path):
    g = GridSpec(10.0, 64)
    rng = np.random.default_rng(0)
    samples = [(0.1 * i, rng.normal(size=64) + 1j * rng.normal(size=64)) for i in range(3)]
    path = tmp_path / "t.bin"
    io.write_trajectory(path, g, 1e-3, samples)
    raw = path.read_bytes()
    assert struct.unpack_from("<dqd", raw) == (10.0, 64, 1e-3)
    assert len(raw) == 24 + 3 * (8 + 16 * 64)
    # interleaved re/im: first field value right after the first sample time
    assert struct.unpack_from("<ddd", raw, 24) == (0.0, samples[0][1][0].real, samples[0][1][0].imag)
    g2, dt, back = io.read_trajectory(path)
    assert g2 == g and dt == 1e-3
    for (t, u), (t2, u2) in zip(samples, back):
        assert t == t2
        np.testing.assert_array_equal(u, u2)


def test_csv_round_trip(tmp_path):
    rows = np.arange(16.0).reshape(2, 8) / 3
    io.write_csv(tmp_path / "m.csv", io.MODULATION_COLUMNS, rows)
    assert (tmp_path / "m.csv").read_text().splitlines()[0] == "t,a,v,gamma,mu,h1_w,residual,lyapunov"
    back = io.read_csv(tmp_path / "m.csv")
    np.testing.assert_array_equal(back["lyapunov"], rows[:, 7])


def test_cli_pipeline(tmp_path):
    out = str(tmp_path)
    assert main(["profile", "--out", out]) == 0
    assert main(["simulate", "--out", out]) == 0
    assert main(["extract", "--out", out]) == 0
    assert main(["effective", "--out", out, "--modulation", str(tmp_path / "modulation.csv")]) == 0
    headers = {name: (tmp_path / name).read_text().splitlines()[0] for name in
               ("diagnostics.csv", "modulation.csv", "effective.csv", "profile.csv")}
    assert headers["diagnostics.csv"] == "t,energy,charge,momentum"
    assert headers["effective.csv"] == "t,a,v,gamma,mu,v_eff,grad_v_eff,b_eff"
    mod, eff = io.read_csv(tmp_path / "modulation.csv"), io.read_csv(tmp_path / "effective.csv")
    np.testing.assert_array_equal(mod["t"], eff["t"])
    assert np.max(mod["residual"]) < 1e-10
    diag = io.read_csv(tmp_path / "diagnostics.csv")
    assert np.ptp(diag["charge"]) / diag["charge"][0] < 1e-10


def test_cli_study_outputs_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["study", "--out", str(a), "--seed", "11", *FAST]) == 0
    assert main(["study", "--out", str(b), "--seed", "11", *FAST]) == 0
    summary = json.loads((a / "summary.json").read_text())
    assert list(summary) == list(io.SUMMARY_KEYS)
    assert summary["epsilons"] == [0.0125, 0.025, 0.05]
    assert json.loads((a / "run_info.json").read_text())["seed"] == 11
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert len(csvs) == 9
    for name in csvs:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert "seed = 11" in (a / "config.txt").read_text()


def test_cli_reports_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nu = 0.9\n")
    assert main(["study", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "solitonlab", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "study" in res.stdout
