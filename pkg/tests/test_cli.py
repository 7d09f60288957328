import json
import subprocess
import sys

import pytest

from tsharvest.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_OVERFLOW, main

FAST = ["--paths", "2", "--horizon", "20", "--no-timestamp"]


def run_cli(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def read_all(run_dir):
    return {p.name: p.read_bytes() for p in sorted(run_dir.iterdir())}


@pytest.mark.parametrize("command", ["analyze", "table1", "yield-curve", "sweep-tau2", "sweep-sigma",
                                     "paths", "validate"])
def test_commands_are_byte_deterministic(tmp_path, command):
    (tmp_path / "v.ini").write_text("[experiment]\nvalidate_increments = 20000\n")
    args = [command, *FAST, "--config", str(tmp_path / "v.ini")]
    assert run_cli(tmp_path, *args, "--label", "a") == EXIT_OK
    assert run_cli(tmp_path, *args, "--label", "b") == EXIT_OK
    a = read_all(tmp_path / command / "a")
    assert "data.csv" in a and "meta.json" in a
    assert a == read_all(tmp_path / command / "b")
    # the worker count changes scheduling only
    assert run_cli(tmp_path, *args, "--label", "c", "--threads", "3") == EXIT_OK
    c = read_all(tmp_path / command / "c")
    assert {k: v for k, v in a.items() if k.endswith(".csv")} == {k: v for k, v in c.items() if k.endswith(".csv")}


def test_heatmap_and_stability_small(tmp_path):
    ini = tmp_path / "small.ini"
    ini.write_text("[experiment]\nbeta_grid = lin:0.2:1.8:4\nlambda_grid = lin:0.5:3:3\n"
                   "stability_paths = 4\ncoupling_pairs = 2\ncoupling_horizon = 10\n")
    assert run_cli(tmp_path, "heatmap", "--config", str(ini), *FAST) == EXIT_OK
    assert {"data.csv", "h_star_grid.csv", "y_star_grid.csv", "plot.svg", "meta.json"} <= set(
        read_all(tmp_path / "heatmap" / "run"))
    assert run_cli(tmp_path, "stability", "--config", str(ini), *FAST) == EXIT_OK


def test_provenance_and_timestamps(tmp_path):
    quick = ["--paths", "2", "--horizon", "20", "--seed", "17"]
    assert run_cli(tmp_path, "yield-curve", "--label", "stamped", *quick) == EXIT_OK
    out = tmp_path / "yield-curve" / "stamped"
    meta = json.loads((out / "meta.json").read_text())
    assert meta["provenance"]["seed"] == 17 and meta["provenance"]["timestamp"]
    assert meta["duration_seconds"] is not None
    assert meta["config"]["sim"]["seed"] == 17
    assert meta["units"]["yield"] == "population/time"
    assert "<metadata>" in (out / "plot.svg").read_text()
    for name in ("data.csv", "optimum.csv", "scatter.csv"):
        head = (out / name).read_text().splitlines()[:3]
        assert head[0].startswith("# config_hash: ") and head[1] == "# seed: 17"
        assert head[2].startswith("# build_id: tsharvest-")
    assert run_cli(tmp_path, "yield-curve", "--label", "plain", *quick, "--no-timestamp") == EXIT_OK
    plain = tmp_path / "yield-curve" / "plain"
    meta = json.loads((plain / "meta.json").read_text())
    assert meta["provenance"]["timestamp"] is None and meta["duration_seconds"] is None
    assert "<metadata>" not in (plain / "plot.svg").read_text()


def test_default_label_is_timestamp(tmp_path):
    assert run_cli(tmp_path, "analyze") == EXIT_OK
    (run_dir,) = (tmp_path / "analyze").iterdir()
    assert run_dir.name.endswith("Z") and run_dir.name[:2] == "20"


def test_overrides_and_formats(tmp_path, capsys):
    assert run_cli(tmp_path, "analyze", "--h", "1.65", "--format", "csv", "--no-timestamp") == EXIT_OK
    files = read_all(tmp_path / "analyze" / "run")
    assert list(files) == ["data.csv"]
    assert "Extinction" in capsys.readouterr().out


def test_exit_codes(tmp_path):
    bad_quad = tmp_path / "q.ini"
    bad_quad.write_text("[quad]\nmax_subdivisions = 1\nrel_tol = 1e-15\nabs_tol = 1e-300\n")
    overflow = tmp_path / "o.ini"
    overflow.write_text("[sim]\nx0 = 1e200\ndt = 0.5\n")
    assert run_cli(tmp_path, "analyze", "--config", str(bad_quad)) == EXIT_NUMERICAL
    assert run_cli(tmp_path, "paths", "--config", str(overflow), "--horizon", "10") == EXIT_OVERFLOW
    assert run_cli(tmp_path, "analyze", "--beta", "2.5") == EXIT_CONFIG
    assert run_cli(tmp_path, "analyze", "--format", "pdf") == EXIT_CONFIG
    assert run_cli(tmp_path, "analyze", "--config", str(tmp_path / "missing.ini")) == EXIT_CONFIG
    assert run_cli(tmp_path, "stability", "--h", "1.65") == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tsharvest", "analyze", "--out", str(tmp_path), "--no-timestamp"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "h_star,0.748125" in proc.stdout
