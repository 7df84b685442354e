import csv
import json
from fractions import Fraction

import pytest

from rauzylab import surface_builder
from rauzylab.cli import run


@pytest.fixture
def torus_iex(tmp_path):
    p = tmp_path / "torus.iex"
    p.write_text("top: 2 1\nbottom: 1 2\nwidths: 1=5/7 2=2/7\n")
    return str(p)


def out_of(capsys, argv, code=0):
    assert run(argv) == code
    return capsys.readouterr().out


def test_xmn_json(capsys):
    assert out_of(capsys, ["torus", "xmn", "--m", "1", "--n", "3", "--json"]).strip() == '{"lower":"1/4","upper":"1/4"}'


def test_twist_json(capsys):
    got = json.loads(out_of(capsys, ["surface", "twist", "--g", "0", "--m", "5", "--n", "2", "--json"]))
    assert got == {"ratio": "1/27"}
    got = json.loads(out_of(capsys, ["surface", "twist", "--g", "4", "--m", "0", "--n", "1", "--json"]))
    assert Fraction(got["ratio"]) == Fraction(1, 2**17)


def test_twist_exact_from_file(capsys, tmp_path):
    path = str(tmp_path / "phi0.iex")
    assert run(["surface", "build", "--g", "4", "--m", "0", "--out", path]) == 0
    capsys.readouterr()
    got = json.loads(out_of(capsys, ["surface", "twist", "--in", path, "--n", "50", "--exact", "--json"]))
    assert Fraction(got["ratio"]) == Fraction(1, 51**17)
    got = json.loads(out_of(capsys, ["surface", "twist", "--g", "0", "--m", "5", "--n", "3", "--hull", "--json"]))
    assert got == {"ratio": "1/64"}


def test_explore_dot(capsys, torus_iex):
    dot = out_of(capsys, ["rauzy", "explore", "--in", torus_iex, "--limit", "10", "--dot"])
    lines = dot.splitlines()
    assert sum("->" in l for l in lines) == 2
    assert sum(l.strip().endswith(";") and "->" not in l for l in lines) == 1


def test_usage_errors(capsys):
    assert run(["bogus"]) == 1
    assert run([]) == 1
    assert run(["torus"]) == 1
    assert run(["torus", "xmn", "--m", "x", "--n", "3"]) == 1
    assert run(["torus", "xmn", "--m", "0", "--n", "3"]) == 1
    assert run(["surface", "build", "--g", "0", "--m", "0"]) == 1
    assert run(["iet", "expand", "--in", "/nonexistent.iex"]) == 1


def test_version(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.startswith("rauzylab ")


def test_consistency_failure(capsys, monkeypatch):
    monkeypatch.setattr(surface_builder, "twist_volume_law", lambda comb, n: Fraction(1, 3))
    assert run(["surface", "twist", "--g", "0", "--m", "4", "--n", "1", "--exact"]) == 2
    assert run(["surface", "twist", "--g", "0", "--m", "4", "--n", "1", "--hull"]) == 2


def test_rationals_round_trip(capsys, torus_iex):
    got = json.loads(out_of(capsys, ["iet", "cylinder", "--in", torus_iex, "--letters", "tb", "--json"]))
    verts = [[Fraction(x) for x in v] for v in got["vertices"]]
    assert all(sum(v) == 1 for v in verts)
    assert Fraction(got["relative_volume"]) == Fraction(1, 6)


def test_deterministic_json(capsys):
    argv = ["surface", "cdist", "--g", "0", "--m", "4", "--C", "100", "--trials", "20", "--seed", "1", "--json"]
    a = out_of(capsys, argv)
    b = out_of(capsys, argv)
    assert a == b


def test_walk_pipeline(capsys, tmp_path):
    path = tmp_path / "est.csv"
    argv = ["walk", "estimate", "--mu", "tree", "--target", "X(1,1)", "--target", "X(3,3)", "--target", "X(5,5)",
            "--steps", "200", "--trials", "4000", "--seed", "7", "--csv", str(path), "--json"]
    got = json.loads(out_of(capsys, argv))
    assert [e["n"] for e in got["estimates"]] == [1, 3, 5]
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["n", "estimate", "ci_lo", "ci_hi", "indeterminate_frac"]
    fit = json.loads(out_of(capsys, ["walk", "fit", "--in", str(path), "--json"]))
    assert 0.35 < fit["rate"] < 0.65


def test_mu_file(capsys, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps([{"matrix": [[1, 0], [1, 1]], "p": "1/2"}, {"matrix": [[1, 1], [0, 1]], "p": "1/2"}]))
    got = json.loads(out_of(capsys, ["walk", "simulate", "--mu", str(mu), "--steps", "5", "--seed", "2", "--json"]))
    assert got["steps"] == 5 and got["resolved"]


def test_surface_build_and_regions(capsys, tmp_path):
    path = tmp_path / "phi0.iex"
    out_of(capsys, ["surface", "build", "--g", "2", "--m", "2", "--out", str(path)])
    got = json.loads(out_of(capsys, ["surface", "regions", "--in", str(path), "--json"]))
    assert (got["genus"], got["punctures"], got["triangles"], got["punctured_monogons"]) == (2, 2, 6, 2)


def test_measure_commands(capsys):
    got = json.loads(out_of(capsys, ["measure", "bc", "--nmax", "101", "--pairwise-c", "4", "--json"]))
    assert got["verdict"]["label"] == "singular-pattern: yes"
    assert got["verdict"]["limsup_lower"] == "1/16"
    got = json.loads(out_of(capsys, ["measure", "distortion", "--g", "0", "--m", "4", "--letters", "bb", "--json"]))
    assert set(got) == {"column_sums", "C_distributed", "uniformly_distorted"}


def test_torus_misc(capsys):
    got = json.loads(out_of(capsys, ["torus", "cylinder", "--word", "R3L2", "--json"]))
    assert got["length"] == "1/21"
    got = json.loads(out_of(capsys, ["torus", "cf", "--x", "2/5", "--json"]))
    assert got["word"] == "R2L2"
    got = json.loads(out_of(capsys, ["torus", "demo", "--nmax", "3", "--budget", "10", "--json"]))
    assert got["harmonic_partial"][-1]["exact"] == "5/8"


def test_iet_expand(capsys, torus_iex):
    got = json.loads(out_of(capsys, ["iet", "expand", "--in", torus_iex, "--json"]))
    assert got["letters"] == "ttb" and got["status"] == "critical widths are equal"
