import csv
import io
import json
import math

import pytest

from paraac_lab import __version__, formulas
from paraac_lab.circuits import dump_circuit, zoo_circuit
from paraac_lab.decision_trees import switching_tail
from paraac_lab.experiments import (
    PLANTED_FIELDS,
    SWITCHING_FIELDS,
    ConfigError,
    ExperimentConfig,
    cmd_gap,
    cmd_planted,
    cmd_switching,
    cmd_verify,
    edge_probe_exact,
    f_inverse,
    gap_parameter,
    k_of_n,
    planted_agreement,
    validate_rho,
)
from paraac_lab.graphs import Graph, parse_graph
from paraac_lab.rng import RngStream


def read_csv(text):
    lines = text.splitlines()
    header = json.loads(lines[0][2:])
    return header, list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_k_schedules():
    assert k_of_n("log2", 256) == 8
    assert k_of_n("sqrt_log2", 256) == 3
    assert k_of_n("sqrt_log2", 32) == 3
    assert k_of_n("sqrt_log2", 16) == 2
    assert k_of_n({"const": 2.5}, 99) == 2.5
    assert k_of_n({"explicit": [2, 3]}, 99, 1) == 3
    for bad in ["cubic", {"const": 0}]:
        with pytest.raises(ConfigError):
            k_of_n(bad, 32)
    with pytest.raises(ConfigError):
        k_of_n({"explicit": [2]}, 99, 1)


def test_rho_validation():
    validate_rho({"const": 1})
    validate_rho({"power": 0.5})
    validate_rho({"table": {"1": 1, "10": 2, "100": 4}})
    for bad in [{"const": 0.5}, {"power": 1.0}, {"power": 1.5}, {"table": {"1": 1, "2": 3}}, {"table": {"1": 1, "10": 1, "11": 3}}, {"cube": 1}]:
        with pytest.raises(ConfigError):
            validate_rho(bad)


def test_f_inverse():
    assert f_inverse("exp2", 256) == 8
    assert f_inverse("exp2", 255) == 7
    assert f_inverse({"power": 2}, 256) == 16
    assert f_inverse({"power": 3}, 0) == 0
    with pytest.raises(ConfigError):
        f_inverse({"power": 0}, 10)


def test_gap_parameter():
    assert gap_parameter(256, "exp2", {"const": 1}) == 3
    assert gap_parameter(64, "exp2", {"const": 1}) == 2
    # sqrt(n)/rho(sqrt n) binds when rho grows
    assert gap_parameter(2**20, {"power": 1}, {"power": 0.5}) == math.floor((2**5 - 1) / 2)
    with pytest.raises(ConfigError):
        gap_parameter(4, "exp2", {"const": 1})


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("planted", {}, 1, 0)
    with pytest.raises(ConfigError):
        ExperimentConfig("planted", {}, -1, 1)
    a = ExperimentConfig("planted", {"n": [8]}, 1, 10)
    b = ExperimentConfig("planted", {"n": [8]}, 1, 10, "elsewhere.csv")
    assert a.digest() == b.digest()
    assert a.digest() != ExperimentConfig("planted", {"n": [9]}, 1, 10).digest()
    assert a.header() == {"tool": "paraac-lab", "version": __version__, "config_sha256": a.digest(), "seed": 1}


def test_planted_const_and_edge_probe():
    cfg = ExperimentConfig("planted", {"n": [32], "circuits": ["const", "edge_probe"]}, 5, 3000)
    rows = {r.circuit: r for r in planted_agreement(cfg)}
    assert rows["const"].agreement == 1.0
    e = rows["edge_probe"]
    assert (e.k, e.c) == (3.0, 6)
    assert e.wilson_lo <= edge_probe_exact(32, e.q, 6) <= e.wilson_hi
    assert edge_probe_exact(32, 32 ** (-1 / 3), 6) == pytest.approx(1 - (1 - 32 ** (-1 / 3)) * math.comb(30, 4) / math.comb(32, 6))


def test_planted_csv_and_errors(tmp_path):
    out = tmp_path / "p.csv"
    cfg = ExperimentConfig("planted", {"n": [16], "circuits": ["triangle", "star"]}, 2, 50, str(out))
    text, code = cmd_planted(cfg)
    assert code == 0 and out.read_text() == text
    header, rows = read_csv(text)
    assert header["seed"] == 2 and header["version"] == __version__
    assert list(rows[0]) == PLANTED_FIELDS
    assert [r["circuit"] for r in rows] == ["triangle", "star"]
    with pytest.raises(ConfigError):
        planted_agreement(ExperimentConfig("planted", {"xi": 1.0}, 1, 1))
    with pytest.raises(ConfigError):
        planted_agreement(ExperimentConfig("planted", {"circuits": ["bogus"]}, 1, 1))


def test_planted_user_circuit(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(dump_circuit(zoo_circuit("triangle", 12)))
    params = {"n": [12], "circuits": ["triangle"], "circuit_files": {"mine": str(path)}}
    rows = planted_agreement(ExperimentConfig("planted", params, 4, 200))
    by = {r.circuit: r.agree for r in rows}
    assert by["mine"] == by["triangle"]


def test_planted_parallel_equals_serial():
    base = {"n": [16, 24], "circuits": ["edge_probe", "triangle", "star"]}
    serial = cmd_planted(ExperimentConfig("planted", dict(base), 8, 120))[0]
    par = cmd_planted(ExperimentConfig("planted", dict(base, workers=2), 8, 120))[0]
    # the worker count is part of the config hash; the data rows must agree
    assert serial.splitlines()[1:] == par.splitlines()[1:]


def test_switching_sweeps():
    text, code = cmd_switching(ExperimentConfig("switching", {"rows": []}, 1, 10))
    assert code == 0
    assert text.splitlines()[1:] == [",".join(SWITCHING_FIELDS)]
    row = {"function": "triangle", "n": 10, "ell": 4, "q": 0.25, "s": 2}
    text, _ = cmd_switching(ExperimentConfig("switching", {"rows": [row]}, 6, 100))
    direct = switching_tail(10, 4, 0.25, zoo_circuit("triangle", 10), 2, 100, RngStream(6, 0))
    assert text.splitlines()[2] == ",".join(["triangle", *direct.csv_row()])
    grid = {"grid": {"function": ["edge_probe"], "n": [8, 10, 12], "ell": [2, 3, 4], "q": [0.5], "s": [1]}}
    a, _ = cmd_switching(ExperimentConfig("switching", grid, 3, 50))
    b, _ = cmd_switching(ExperimentConfig("switching", grid, 3, 50))
    assert a == b and len(a.splitlines()) == 2 + 9
    with pytest.raises(ConfigError):
        cmd_switching(ExperimentConfig("switching", {"grid": {"n": [8]}}, 3, 5))
    with pytest.raises(ConfigError):
        cmd_switching(ExperimentConfig("switching", {"rows": [{"n": 8}]}, 3, 5))


def test_switching_user_circuit(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(dump_circuit(zoo_circuit("star", 9)))
    rows = [{"function": f"circuit:{path}", "n": 9, "ell": 4, "q": 0.25, "s": 2},
            {"function": "star", "n": 9, "ell": 4, "q": 0.25, "s": 2}]
    text, _ = cmd_switching(ExperimentConfig("switching", {"rows": rows}, 1, 80))
    # same n, ell, q, s and DNF width r for the loaded copy
    params = [line.split(",")[1:6] for line in text.splitlines()[2:]]
    assert params[0] == params[1] == ["9", "4", "0.25", "2", "4"]
    bad = [{"function": f"circuit:{path}", "n": 10, "ell": 4, "q": 0.25, "s": 2}]
    with pytest.raises(ConfigError):
        cmd_switching(ExperimentConfig("switching", {"rows": bad}, 1, 5))


def test_verify_default_passes():
    text, code = cmd_verify(ExperimentConfig("verify", {}, 1, 1))
    report = json.loads(text)
    assert code == 0 and report["all_pass"]
    assert set(report["suites"]) == {"reduction", "weighted_sat", "gamma11", "colorcoding"}
    assert all(s["checked"] > 0 and s["mismatches"] == 0 for s in report["suites"].values())


def test_verify_detects_mutated_delta_builder(monkeypatch):
    real = formulas.build_delta_g

    def broken(g: Graph):
        f = real(g)
        # drop the first clause
        return formulas.And(f.children[1:], f.universe)

    monkeypatch.setattr(formulas, "build_delta_g", broken)
    text, code = cmd_verify(ExperimentConfig("verify", {"suites": ["weighted_sat"]}, 1, 1))
    report = json.loads(text)
    assert code == 1 and not report["all_pass"]
    assert report["suites"]["weighted_sat"]["mismatches"] > 0


def test_verify_empty_scope(caplog):
    text, code = cmd_verify(ExperimentConfig("verify", {"suites": {}}, 1, 1))
    report = json.loads(text)
    assert code == 0 and report["all_pass"] and "warning" in report
    assert "empty scope" in caplog.text
    with pytest.raises(ConfigError):
        cmd_verify(ExperimentConfig("verify", {"suites": ["nope"]}, 1, 1))


def test_gap_outputs(tmp_path):
    out = tmp_path / "gap"
    cfg = ExperimentConfig("gap", {"n": 64, "samples": 6}, 12, 1, str(out))
    text, code = cmd_gap(cfg)
    man = json.loads(text)
    assert code == 0
    assert (man["k"], man["threshold"], man["planted_size"], man["f_inverse"]) == (2, 5, 8, 6)
    assert man["all_planted_certified"] and len(man["records"]) == 6
    assert all(r["cn_planted"] >= 8 for r in man["records"])
    yes = parse_graph((out / "yes.graph").read_text())
    assert yes.is_clique(man["records"][0]["planted_set"])
    first = (out / "no.graph").read_text().splitlines()[0]
    assert json.loads(first[2:])["config_sha256"] == cfg.digest()
    with pytest.raises(ConfigError):
        cmd_gap(ExperimentConfig("gap", {"n": 4}, 1, 1, str(out)))
