import math

import numpy as np
import pytest

from superarrivals.analysis import parse_kv
from superarrivals.cli import EXIT_CONFIG, EXIT_OK, EXIT_USAGE, RunManifest, cmd_run, main
from superarrivals.io import read_csv

V0 = 49748.02
W = 0.064


def test_missing_config(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "config not found" in capsys.readouterr().err


def test_bad_config_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("x0 = 1.2\n\nspeed = 3\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err


def test_invalid_config_values(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("x_prime = 1.3\n")
    assert main(["run", "--mode", "static", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "x_prime" in capsys.readouterr().err


def test_empty_sweep_is_usage_error(tmp_path):
    assert main(["sweep", "--N", "--out", str(tmp_path)]) == EXIT_USAGE


def test_unknown_mode_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["run", "--mode", "banana", "--out", str(tmp_path)])
    assert err.value.code == EXIT_USAGE


def test_planewave_no_barrier(tmp_path):
    out = tmp_path / "pw.csv"
    assert main(["planewave", "--V0", "0", "--p-min", "10", "--p-max", "300", "--out", str(out)]) == EXIT_OK
    data = read_csv(out)
    assert out.read_text().startswith("p,R2\n")
    assert np.all(data["R2"] == 0)


def test_planewave_default_barrier_row(tmp_path):
    out = tmp_path / "pw.csv"
    assert main(["planewave", "--p-min", "50pi", "--p-max", "50pi", "--points", "1", "--out", str(out)]) == 0
    data = read_csv(out)
    assert data["p"][0] == pytest.approx(50 * math.pi)
    assert data["R2"][0] > 0.999


def test_planewave_resonance_row(tmp_path):
    out = tmp_path / "pw.csv"
    p_res = math.sqrt(V0 + (math.pi / W) ** 2)
    args = ["planewave", "--V0", str(V0), "--width", str(W), "--p-min", repr(p_res),
            "--p-max", repr(p_res), "--points", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert read_csv(out)["R2"][0] < 1e-9


def test_planewave_invalid_range(tmp_path):
    assert main(["planewave", "--p-min", "-5", "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE
    assert main(["planewave", "--p-min", "10", "--p-max", "5", "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE


@pytest.fixture(scope="module")
def pair_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("pair")
    assert main(["run", "--mode", "pair", "--N", "2", "--out", str(out)]) == EXIT_OK
    return out


def test_pair_outputs(pair_dir):
    names = {p.name for p in pair_dir.iterdir()}
    assert {"trace_static.csv", "trace_N2.csv", "report.txt", "report.kv"} <= names
    assert any(n.startswith("snapshot_0.0008_") for n in names)
    kv = parse_kv((pair_dir / "report.kv").read_text())
    assert kv["eta"] == pytest.approx(0.50, abs=0.10)
    assert kv["locality_violated"] is True
    assert (pair_dir / "trace_N2.csv").read_text().startswith("t,R2,norm\n")


def test_static_mode(tmp_path):
    assert main(["run", "--mode", "static", "--out", str(tmp_path)]) == EXIT_OK
    names = {p.name for p in tmp_path.iterdir()}
    assert "trace_static.csv" in names and "report.kv" not in names
    assert {"snapshot_0.csv", "snapshot_0.0008.csv", "snapshot_0.0035.csv"} <= names
    kv = parse_kv((tmp_path / "asymptote.kv").read_text())
    assert kv["R0_dynamic"] == pytest.approx(kv["R0_planewave"], rel=0.01)


def test_snapshot_at_and_perturbed_mode(tmp_path):
    args = ["run", "--mode", "perturbed", "--N", "10", "--snapshot-at", "0.001", "0.0012",
            "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    names = {p.name for p in tmp_path.iterdir()}
    assert names == {"trace_N10.csv", "snapshot_0.001.csv", "snapshot_0.0012.csv"}
    snap = read_csv(tmp_path / "snapshot_0.001.csv")
    assert list(snap) == ["x", "re", "im", "density"]


def test_run_requires_single_N(tmp_path):
    assert main(["run", "--N", "2", "10", "--out", str(tmp_path)]) == EXIT_USAGE


def test_run_is_deterministic(tmp_path, pair_dir):
    again = tmp_path / "again"
    assert cmd_run(RunManifest(out_dir=again, mode="pair", N_list=[2])) == EXIT_OK
    for name in ("trace_static.csv", "trace_N2.csv", "report.kv", "report.txt"):
        assert (again / name).read_bytes() == (pair_dir / name).read_bytes()


def test_config_file_and_D_convention(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("barrier_height = 2E\nx_prime = auto\nn_steps = 1000\n")
    out = tmp_path / "out"
    args = ["run", "--config", str(cfg), "--D-convention", "center", "--out", str(out)]
    assert main(args) == EXIT_OK
    kv = parse_kv((out / "report.kv").read_text())
    assert kv["D"] == pytest.approx(0.375)
    assert kv["tau"] == pytest.approx(7.98e-4 + 0.375 / (100 * math.pi))


def test_threshold_flag(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--threshold", "1e-2", "--out", str(out)]) == EXIT_OK
    assert parse_kv((out / "report.kv").read_text())["threshold"] == 1e-2
