import json
import subprocess
import sys

import numpy as np
import pytest

from magphon.cli import main


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_tail_roundtrip_and_thread_independence(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    rc = main(["tail", "--seed", "11", "--out", str(a),
               "--set", "samples=20000"])
    assert rc == 0
    rc = main(["tail", "--seed", "11", "--out", str(b),
               "--set", "samples=20000", "--threads", "1"])
    assert rc == 0
    assert _read(a / "tail_samples.csv") == _read(b / "tail_samples.csv")
    assert _read(a / "tail_report.json") == _read(b / "tail_report.json")
    doc = json.loads(_read(a / "tail_report.json"))
    assert 1.0 < doc["hill_estimate"] < 2.5
    assert doc["meta"]["master_seed"] == 11


def test_tail_exit_codes(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("not_a_key: 3\n")
    assert main(["tail", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["tail", "--seed", "1", "--out", str(tmp_path),
                 "--set", "samples=500"]) == 2


def test_ctrw_zero_horizon_and_determinism(tmp_path):
    out = tmp_path / "run"
    rc = main(["ctrw", "--seed", "4", "--out", str(out),
               "--set", "paths=200", "--set", "n_list=[50]",
               "--set", "t=0.0"])
    assert rc == 0
    rows = [line for line in _read(out / "ctrw_endpoints.csv").decode()
            .splitlines() if line and not line.startswith("#")]
    data = np.array([r.split(",") for r in rows[1:]])
    assert np.all(data[:, 3].astype(float) == 0.0)
    assert np.all(data[:, 4].astype(int) == 0)

    out2 = tmp_path / "run2"
    main(["ctrw", "--seed", "9", "--out", str(out), "--set", "paths=500",
          "--set", "n_list=[100]"])
    main(["ctrw", "--seed", "9", "--out", str(out2), "--set", "paths=500",
          "--set", "n_list=[100]", "--threads", "1"])
    assert _read(out / "ctrw_endpoints.csv") == \
        _read(out2 / "ctrw_endpoints.csv")


def test_fit_reads_ctrw_output(tmp_path):
    out = tmp_path / "fit"
    main(["ctrw", "--seed", "12", "--out", str(out),
          "--set", "paths=20000", "--set", "n_list=[400]"])
    rc = main(["fit", "--seed", "12", "--out", str(out),
               "--set", f"input={out / 'ctrw_endpoints.csv'}"])
    assert rc == 0
    doc = json.loads(_read(out / "stable_fit.json"))
    assert 1.3 < doc["exponent"] < 2.0
    assert doc["d_constant"] > 0.0
    assert doc["n_paths"] == 20000


def test_compare_requires_d(tmp_path):
    assert main(["compare", "--out", str(tmp_path)]) == 1


def test_compare_time_zero_difference_is_zero(tmp_path):
    out = tmp_path / "cmp"
    rc = main(["compare", "--seed", "3", "--out", str(out),
               "--set", "d_constant=0.3", "--set", "t=0.0",
               "--set", "n_scale=100", "--set", "paths_per_point=2000",
               "--set", "y_grid={lo: -2.0, hi: 2.0, n: 5}",
               "--set", "n_points=4096"])
    assert rc == 0
    rows = [line for line in _read(out / "compare_points.csv").decode()
            .splitlines() if line and not line.startswith("#")]
    diffs = np.array([float(r.split(",")[4]) for r in rows[1:]])
    assert np.max(np.abs(diffs)) < 1e-9


def test_compare_frozen_reference_flag(tmp_path):
    out = tmp_path / "frozen"
    rc = main(["compare", "--seed", "3", "--out", str(out),
               "--set", "d_constant=0.0", "--set", "t=1.0",
               "--set", "n_scale=100", "--set", "paths_per_point=500",
               "--set", "y_grid={lo: -2.0, hi: 2.0, n: 3}",
               "--set", "n_points=4096"])
    assert rc == 0
    doc = json.loads(_read(out / "compare_summary.json"))
    assert "note" in doc


def test_chain_quiet_run_energy_constant(tmp_path):
    out = tmp_path / "chain"
    rc = main(["chain", "--seed", "5", "--out", str(out),
               "--set", "gamma=0.0", "--set", "ensemble=2",
               "--set", "n_sites=64", "--set", "t_macro=0.2",
               "--set", "dt=0.025", "--set", "epsilon=0.25"])
    assert rc == 0
    rows = [line for line in _read(out / "chain_energy.csv").decode()
            .splitlines() if line and not line.startswith("#")]
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    for traj in (0, 1):
        e = data[data[:, 0] == traj, 2]
        assert np.max(np.abs(e - e[0])) < 1e-12 * e[0]


def test_chain_reproducible_across_threads(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["chain", "--seed", "6", "--set", "ensemble=2",
            "--set", "n_sites=64", "--set", "t_macro=0.1",
            "--set", "dt=0.025", "--set", "epsilon=0.25"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b), "--threads", "1"])
    for name in ("chain_energy.csv", "chain_wigner.csv"):
        assert _read(a / name) == _read(b / name)


def test_fracdiff_outputs_solution(tmp_path):
    out = tmp_path / "fd"
    rc = main(["fracdiff", "--out", str(out), "--set", "times=[0.0,1.0]",
               "--set", "n_points=4096", "--set", "half_length=100.0"])
    assert rc == 0
    rows = [line for line in _read(out / "fracdiff_solution.csv").decode()
            .splitlines() if line and not line.startswith("#")]
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    t0 = data[data[:, 0] == 0.0]
    t1 = data[data[:, 0] == 1.0]
    assert t0.shape[0] == 4096 and t1.shape[0] == 4096
    # mass preserved between the two times
    assert np.sum(t0[:, 2]) == pytest.approx(np.sum(t1[:, 2]), rel=1e-12)
    # spreading lowers the peak
    assert t1[:, 2].max() < t0[:, 2].max()


def test_boltzmann_subcommand_points(tmp_path):
    out = tmp_path / "mc"
    rc = main(["boltzmann", "--seed", "2", "--out", str(out),
               "--set", "paths=500", "--set", "n_scale=100",
               "--set", "t=0.0", "--set", "points=[[0.0, 0.2, 1]]"])
    assert rc == 0
    rows = [line for line in _read(out / "boltzmann_solution.csv").decode()
            .splitlines() if line and not line.startswith("#")]
    vals = rows[1].split(",")
    assert float(vals[5]) == pytest.approx(1.0)  # u0(0, k, i) at the center
    assert float(vals[6]) == 0.0


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "magphon", "tail", "--seed", "1",
         "--out", "/tmp/magphon_entry", "--set", "samples=15000"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr


def test_metadata_lines_prefixed(tmp_path):
    out = tmp_path / "meta"
    main(["fracdiff", "--out", str(out), "--set", "n_points=256",
          "--set", "half_length=20.0"])
    text = _read(out / "fracdiff_solution.csv").decode().splitlines()
    assert text[0].startswith("# config = ")
    assert any(line.startswith("# version = ") for line in text[:3])
    assert any(line.startswith("# master_seed = ") for line in text[:3])
    header_idx = next(i for i, line in enumerate(text)
                      if not line.startswith("#"))
    assert text[header_idx] == "t,y,value"
