import hashlib
import json
import subprocess
import sys

import pytest

from freebrown import __version__
from freebrown.cli import main

HAAR = '{"atom0": 0.0, "atoms": [{"x": 1.0, "w": 1.0}]}'


@pytest.fixture
def haar_json(tmp_path):
    p = tmp_path / "haar.json"
    p.write_text(HAAR)
    return str(p)


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "t,r"
    return {float(t): float(r) for t, r in (line.split(",") for line in lines[1:])}


def test_compress_row_at_half(haar_json, tmp_path):
    out = tmp_path / "c.csv"
    assert main(["compress", "--measure", haar_json, "--s", "2", "--scaling", "sqrt-s", "--out", str(out)]) == 0
    assert _rows(out)[0.5] == pytest.approx(0.81649658, abs=1e-8)
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["delta_s"] == 0 and meta["r_max"] == pytest.approx(1.0)
    assert meta["config"]["command"] == "compress" and meta["config"]["flags"]["s"] == 2.0


def test_stable_moments_json(tmp_path):
    out = tmp_path / "st.csv"
    assert main(["stable", "--beta", "1", "--moments", "1,2", "--nu-moments", "0.25", "--out", str(out)]) == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["abs_moments"]["1"] == pytest.approx(1.5707963267948966)
    assert meta["abs_moments"]["2"] == "inf"
    assert meta["nu_moments"]["0.25"] == pytest.approx(2**0.5)
    assert "1.5707963" in out.with_suffix(".json").read_text()
    assert _rows(out)[0.5] == pytest.approx(1.0, abs=1e-11)


def test_transform_prints_csv(haar_json, capsys):
    assert main(["transform", "--measure", haar_json, "--which", "psi", "--at", "-1", "--at", "-3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["w,value", "-1,-0.5", "-3,-0.75"]


def test_exit_code_validation(haar_json, capsys):
    assert main(["transform", "--measure", haar_json, "--which", "chi", "--at", "0.5"]) == 2
    assert main(["compress", "--measure", haar_json, "--s", "0.5", "--out", "x.csv"]) == 2
    assert main(["stable", "--beta", "1", "--bogus", "--out", "x.csv"]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert all(line.startswith("freebrown:") for line in err)


def test_exit_code_numerical(tmp_path, monkeypatch):
    from freebrown import rmt

    monkeypatch.setattr(rmt, "COND_LIMIT", 1.0)
    out = tmp_path / "r.json"
    assert main(["rmt", "product", "--n", "8", "--k", "1", "--trials", "1", "--seed", "1", "--out", str(out)]) == 3


def test_seed_from_environment(tmp_path, monkeypatch):
    out = tmp_path / "r.json"
    monkeypatch.delenv("FREEBROWN_SEED", raising=False)
    assert main(["rmt", "ginibre", "--n", "16", "--trials", "1", "--out", str(out)]) == 2
    monkeypatch.setenv("FREEBROWN_SEED", "42")
    assert main(["rmt", "ginibre", "--n", "16", "--trials", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["config"]["seed"] == 42


def _digest(path, drop=()):
    data = json.loads(path.read_text())
    for key in drop:
        data.pop(key)
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def test_hash_stable_outputs(haar_json, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        main(["compress", "--measure", haar_json, "--s", "3", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()
    ra, rb = tmp_path / "ra.json", tmp_path / "rb.json"
    for out in (ra, rb):
        main(["rmt", "truncated-haar", "--n", "32", "--s", "2", "--trials", "2", "--seed", "7", "--out", str(out)])
    # everything except the wall-clock timing is reproducible
    assert _digest(ra, ["wall_time_s", "config"]) == _digest(rb, ["wall_time_s", "config"])


def test_rmt_moments(tmp_path):
    out = tmp_path / "m.json"
    assert main(["rmt", "moments", "--n", "32", "--k", "1", "--gamma", "0", "--trials", "2", "--seed", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["empirical"] == 1.0


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_version_entry_point():
    res = subprocess.run([sys.executable, "-m", "freebrown.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
