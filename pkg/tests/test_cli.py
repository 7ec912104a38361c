import json
import subprocess
import sys

import numpy as np
import pytest

import golden
from biwalk.cli import run
from biwalk.io import read_csv_matrix


@pytest.fixture
def ex8_file(tmp_path):
    p = tmp_path / "ex8.json"
    p.write_text(json.dumps({"partA": golden.EX8_PART_A, "partB": golden.EX8_PART_B,
                             "edges": [list(e) for e in golden.EX8_EDGES]}))
    return p


def test_build_path8_csv(tmp_path, capsys):
    out = tmp_path / "U.csv"
    assert run(["build", "--family", "path:8", "--out", str(out)]) == 0
    assert np.array_equal(read_csv_matrix(out), golden.P8_U)
    assert "(e0 e1 e3 e5 e6 e4 e2)" in capsys.readouterr().out


def test_build_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["build", "--family", "crown:4", "--out", str(a)])
    run(["build", "--family", "crown:4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_hdigraph_dot(tmp_path):
    dot = tmp_path / "out.dot"
    assert run(["hdigraph", "--family", "path:8", "--dot", str(dot)]) == 0
    text = dot.read_text()
    assert text.startswith("digraph") and text.count("->") == 21
    assert len({line.split('"')[1] for line in text.splitlines() if line.strip().endswith('";')}) == 7


def test_pst_scan_ex8(ex8_file, tmp_path, capsys):
    out = tmp_path / "events.jsonl"
    assert run(["pst-scan", "--input", str(ex8_file), "--kmax", "300000",
                "--one-based", "--out", str(out)]) == 0
    events = [json.loads(line) for line in out.read_text().splitlines()]
    pairs = {(e["source"], e["target"]) for e in events}
    assert {"source": 1, "target": 6, "k": 1} == {k: events[0][k] for k in ("source", "target", "k")}
    assert (6, 1) not in pairs
    assert "1->6" in capsys.readouterr().out


def test_pst_scan_stdout_and_suprema(ex8_file, tmp_path, capsys):
    sup = tmp_path / "sup.csv"
    assert run(["pst-scan", "--input", str(ex8_file), "--kmax", "10", "--suprema", str(sup)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0]) == {"fidelity": json.loads(lines[0])["fidelity"], "k": 1, "source": 0, "target": 5}
    assert sup.read_text().startswith("source,target,max_fidelity,k\n")


def test_classify_and_hamiltonian(capsys):
    assert run(["classify", "--family", "cycle:12"]) == 0
    assert "4 x oriented K_3" in capsys.readouterr().out
    assert run(["hamiltonian", "--family", "path:7", "--power", "1"]) == 0
    out = capsys.readouterr().out
    assert "False" in out


def test_domain_error_exit_code(capsys):
    assert run(["hamiltonian", "--family", "path:5"]) == 1
    assert "MinusOnePersists" in capsys.readouterr().err
    assert run(["check-identity", "--family", "path:6"]) == 1


def test_usage_errors(capsys):
    assert run(["build", "--family", "star:4"]) == 2
    assert run(["build"]) == 2
    assert run(["build", "--family", "path:65"]) == 2
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["spectrum", "--family", "path:4", "--cluster-tol", "-1"])
    assert exc.value.code == 2


def test_env_tolerance(monkeypatch):
    monkeypatch.setenv("BIWALK_TOL_CLUSTER", "0")
    with pytest.raises(SystemExit) as exc:
        run(["spectrum", "--family", "path:4"])
    assert exc.value.code == 2
    monkeypatch.setenv("BIWALK_TOL_CLUSTER", "1e-8")
    assert run(["spectrum", "--family", "path:4"]) == 0


def test_other_commands(tmp_path, capsys):
    assert run(["upst", "--n", "8", "--out", str(tmp_path / "s.csv")]) == 0
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 43
    assert run(["check-arc-reversal", "--family", "complete:4"]) == 0
    assert run(["check-vertex-face", "--family", "kn-embed:5"]) == 0
    assert run(["check-identity", "--family", "kn-embed:5", "--variant", "single"]) == 0
    assert run(["embed", "--family", "kn-embed:4", "--outdir", str(tmp_path), "--out", "faces.json"]) == 0
    faces = json.loads((tmp_path / "faces.json").read_text())
    assert len(faces) == 4
    assert run(["spectrum", "--family", "cycle:4", "--out", str(tmp_path / "sp.json")]) == 0
    assert "rank 2" in capsys.readouterr().out


def test_graph_json_roundtrip_through_cli(tmp_path):
    first = tmp_path / "a.json"
    run(["build", "--family", "cycle:6", "--json", str(first)])
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps(json.loads(first.read_text())["graph"]))
    second = tmp_path / "b.json"
    run(["build", "--input", str(graph), "--json", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "biwalk.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "biwalk" in res.stdout
