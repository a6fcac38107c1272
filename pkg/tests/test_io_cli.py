import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaplab import cli
from gaplab import io as gio
from gaplab.measures import DiscreteMeasure, RealSequence

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300)


@settings(max_examples=50)
@given(st.lists(st.tuples(finite, finite.filter(lambda v: v != 0)), min_size=1, max_size=20,
                unique_by=lambda t: t[0]))
def test_measure_round_trip_exact(pairs):
    mu = DiscreteMeasure([p[0] for p in pairs], [p[1] for p in pairs], label="rt")
    back = gio.parse_measure(gio.format_measure(mu, ["a comment"]))
    assert np.array_equal(back.sites, mu.sites) and np.array_equal(back.masses, mu.masses)
    assert back.label == "rt"


def test_sequence_round_trip_and_errors(tmp_path):
    seq = RealSequence(np.cumsum(np.random.default_rng(0).uniform(0.1, 1, 30)) / 3)
    path = tmp_path / "s.txt"
    gio.write_sequence(path, seq, ["points"])
    assert np.array_equal(gio.read_sequence(path).points, seq.points)
    with pytest.raises(ValueError):
        gio.parse_sequence("1 2\n")
    with pytest.raises(ValueError):
        gio.parse_measure("1\n")


def test_json_is_canonical():
    a = gio.format_json({"b": 1.0, "a": [np.float64(0.1), np.nan]})
    assert a == gio.format_json({"a": [0.1, float("nan")], "b": 1.0})
    assert json.loads(a)["a"] == [0.1, "nan"]


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = cli.main(["--out", str(out), *args])
    return code, out


def test_highpass_command(tmp_path):
    code, out = run(tmp_path, "highpass", "--spacing", "1", "--gap", "1.5708", "--atoms", "201")
    assert code == 0
    assert {p.name for p in out.iterdir()} == {"measure.txt", "residual.json", "sign_changes.json", "manifest.json"}
    manifest = json.loads((out / "manifest.json").read_text())
    h = manifest["config_hash"]
    assert h in (out / "measure.txt").read_text()
    assert json.loads((out / "residual.json").read_text())["config_hash"] == h
    assert json.loads((out / "sign_changes.json").read_text())["passed"] is True
    mu = gio.read_measure(out / "measure.txt")
    assert len(mu) == 201


def test_gap_sweep_command(tmp_path):
    code, out = run(tmp_path, "gap-sweep", "--A", "evens", "--B", "odds", "--window", "16",
                    "--a-min", "0.5", "--a-max", "4.0", "--points", "3", "--restarts", "3",
                    "--bracket-rtol", "0.1")
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash:") and lines[1] == "a,residual,converged,restarts"
    assert len(lines) == 5
    br = json.loads((out / "bracket.json").read_text())
    assert br["lo"] < br["hi"] and br["prediction"] == pytest.approx(np.pi)


def test_gap_sweep_without_transition_is_numerical_failure(tmp_path):
    code, out = run(tmp_path, "gap-sweep", "--A", "evens", "--B", "odds", "--window", "8",
                    "--a-min", "0.5", "--a-max", "1.0", "--points", "2", "--restarts", "2")
    assert code == cli.EXIT_NUMERICAL
    assert "error" in json.loads((out / "bracket.json").read_text())
    assert json.loads((out / "manifest.json").read_text())["status"] == "numerical-failure"


def test_validation_errors_write_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("atoms = 4\n")
    code, out = run(tmp_path, "--config", str(bad), "highpass")
    assert code == cli.EXIT_VALIDATION and not out.exists()
    assert "atoms" in capsys.readouterr().err
    bad.write_text("this line is malformed\n")
    assert run(tmp_path, "--config", str(bad), "highpass")[0] == cli.EXIT_VALIDATION
    bad.write_text("no_such_key = 1\n")
    assert run(tmp_path, "--config", str(bad), "highpass")[0] == cli.EXIT_VALIDATION
    assert run(tmp_path, "gap-sweep", "--A", "primes", "--B", "odds")[0] == cli.EXIT_VALIDATION
    assert run(tmp_path, "determinacy", "--measure", str(tmp_path / "missing.txt"))[0] == cli.EXIT_VALIDATION
    assert run(tmp_path, "no-such-command")[0] == cli.EXIT_VALIDATION
    assert not out.exists()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# highpass settings\natoms = 101\nfill = 0.9\n")
    code, out = run(tmp_path, "--config", str(cfg), "highpass", "--fill", "0.8")
    assert code == 0
    params = json.loads((out / "manifest.json").read_text())["parameters"]
    assert params["atoms"] == 101 and params["fill"] == 0.8


def test_other_commands(tmp_path):
    code, out = run(tmp_path, "uniformity", "--preset", "integers", "--window", "512")
    assert code == 0 and json.loads((out / "uniformity.json").read_text())["verdict"] == "pass"
    code, out = run(tmp_path, "krein-check", "--sine", "100", "--scan-points", "201")
    assert code == 0
    rep = json.loads((out / "krein.json").read_text())
    assert rep["summability"]["non_summable"] is True
    code, out = run(tmp_path, "determinacy", "--preset", "gaussian", "--a", "1")
    assert code == 0
    assert json.loads((out / "verdict.json").read_text())["verdict"] == "determinate-like"


def test_outputs_are_byte_identical(tmp_path):
    args = ["krein-check", "--sine", "50", "--scan-points", "101"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert cli.main(["--out", str(a), *args]) == 0
    assert cli.main(["--out", str(b), *args]) == 0
    for name in ("krein.json", "double_zero_scan.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["files"] == mb["files"] and ma["config_hash"] == mb["config_hash"]
