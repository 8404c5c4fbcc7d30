from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pcglab.cli import build_parser, main, resolve_settings
from pcglab.graph import Graph, encode_graph6
from pcglab.topology import enumerate_topologies
from pcglab.witness import Witness, verify_witness


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    data = json.loads(out.out) if out.out.strip().startswith("{") else None
    return code, data, out


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, g in {"k2": Graph.complete(2), "c4": Graph.cycle(4), "p3": Graph.path(3),
                    "k3": Graph.complete(3)}.items():
        p = tmp_path / f"{name}.g6"
        p.write_text(encode_graph6(g) + "\n")
        paths[name] = str(p)
    w = tmp_path / "k2.json"
    w.write_text(json.dumps({"schema": 1, "tree": "(a:1,b:1);", "assignment": {"0": "a", "1": "b"},
                             "intervals": [[2, 2]]}))
    paths["k2w"] = str(w)
    paths["dir"] = tmp_path
    return paths


def test_verify_ok_and_fail(capsys, files):
    code, data, _ = run(capsys, "verify", "--graph", files["k2"], "--witness", files["k2w"])
    assert code == 0 and data["ok"] and data["schema"] == 1
    empty = files["dir"] / "e2.g6"
    empty.write_text(encode_graph6(Graph.empty(2)))
    code, data, _ = run(capsys, "verify", "--graph", str(empty), "--witness", files["k2w"])
    assert code == 1 and not data["ok"] and data["violations"]


def test_search_emits_verified_witness(capsys, files):
    out = files["dir"] / "c4w.json"
    code, data, _ = run(capsys, "search", "--graph", files["c4"], "-k", "1", "--out", str(out))
    assert code == 0 and data["found"]
    w = Witness.load(out)
    assert verify_witness(Graph.cycle(4), w).ok
    assert Witness.from_json(data["witness"]).to_json() == w.to_json()


def test_search_infeasible_at_bounds(capsys, files):
    p5 = files["dir"] / "x.g6"
    p5.write_text(encode_graph6(Graph.path(4)))
    code, data, _ = run(capsys, "search", "--graph", str(p5), "-k", "1", "--max-weight", "1")
    assert code == 1 and not data["found"] and data["exhausted"]


def test_usage_and_io_errors(capsys, files):
    assert run(capsys, "search", "--graph", "/nonexistent.g6")[0] == 2
    bad = files["dir"] / "bad.g6"
    bad.write_text("C h\n")
    assert run(capsys, "search", "--graph", str(bad))[0] == 2
    assert run(capsys, "bogus-command")[0] == 2
    assert run(capsys, "search", "--graph", files["k2"], "-k", "0")[0] == 2
    assert run(capsys, "enum-topologies", "-n", "2")[0] == 2


def test_construct_universal_and_trace(capsys, files):
    out = files["dir"] / "k3w.json"
    code, data, _ = run(capsys, "construct", "--graph", files["k3"], "--via", "universal",
                        "--out", str(out), "--trace", "--max-weight", "4")
    assert code == 0 and data["ok"] and data["trace"]["p"] is not None
    assert verify_witness(Graph.complete(3), Witness.load(out)).ok
    assert len(data["witness"]["intervals"]) == 2


def test_construct_almost_universal_with_base(capsys, files):
    code, data, _ = run(capsys, "construct", "--graph", files["p3"], "--via", "almost-universal",
                        "--node", "2", "--base-witness", files["k2w"])
    assert code == 0 and data["witness"]["intervals"] == [[6, 6], [8, 12]]
    assert run(capsys, "construct", "--graph", files["c4"], "--via", "universal")[0] == 2


def test_export_ilp(capsys, files):
    topo = files["dir"] / "t.nwk"
    topo.write_text("((0,1),(2,3));\n")
    assign = files["dir"] / "a.json"
    assign.write_text(json.dumps({"0": "0", "1": "2", "2": "1", "3": "3"}))
    model = files["dir"] / "m.lp"
    code, data, _ = run(capsys, "export-ilp", "--graph", files["c4"], "--topology-file", str(topo),
                        "--assignment", str(assign), "-k", "2", "--max-weight", "4",
                        "--out", str(model))
    assert code == 0 and data["constraints"] == 6 + 4 * 4 + 5 * 2 + 1 + 2
    text = model.read_text()
    assert text.startswith("\\") and text.rstrip().endswith("End")
    code, data, _ = run(capsys, "export-ilp", "--graph", files["k3"], "--topology-file", str(topo))
    assert code == 2


@pytest.mark.parametrize("n", [3, 5, 6])
def test_enum_topologies(capsys, n):
    code, data, _ = run(capsys, "enum-topologies", "-n", str(n))
    assert code == 0 and data["count"] == len(enumerate_topologies(n)) == len(data["topologies"])
    code, data, _ = run(capsys, "enum-topologies", "-n", str(n), "--format", "dot")
    assert all(t.startswith("graph") for t in data["topologies"])


def test_batch_json_lines(capsys, files):
    lst = files["dir"] / "list.txt"
    lst.write_text("# four-node graphs\nCr\nCh\nC~\n")
    code = main(["batch", "--graphs", str(lst), "-k", "1"])
    out = capsys.readouterr()
    rows = [json.loads(ln) for ln in out.out.splitlines()]
    assert code == 0 and len(rows) == 3 and all(r["found"] for r in rows)
    assert json.loads(out.err.splitlines()[-1])["found"] == 3


def test_reproduce_without_catalog(capsys, tmp_path):
    code, data, out = run(capsys, "reproduce-paper", "--catalog", str(tmp_path))
    assert code == 0 and data["status"] == "skipped: catalog missing"
    assert "catalog missing" in out.err


def test_config_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "pcglab.toml").write_text("max_weight = 3\nworkers = 2\n[search]\nk = 1\n")
    parser = build_parser()
    args = parser.parse_args(["search", "--graph", "x"])
    s = resolve_settings(args, env={})
    assert (s["max_weight"], s["workers"], s["k"]) == (3, 2, 1)
    s = resolve_settings(args, env={"PCGLAB_MAX_WEIGHT": "5", "PCGLAB_DETERMINISTIC": "false"})
    assert s["max_weight"] == 5 and s["deterministic"] is False
    args = parser.parse_args(["search", "--graph", "x", "--max-weight", "7"])
    assert resolve_settings(args, env={"PCGLAB_MAX_WEIGHT": "5"})["max_weight"] == 7


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "pcglab", "verify", "--graph", files["k2"],
                           "--witness", files["k2w"]], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
