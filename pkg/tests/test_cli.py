import json

import pytest

from fmdiameter.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def k3(tmp_path):
    return {
        "graph": write(tmp_path / "g.json", {"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}),
        "zero": write(tmp_path / "zero.json", {"matching": [], "cycles": []}),
        "half": write(tmp_path / "half.json", {"matching": [], "cycles": [[0, 1, 2]]}),
        "edge": write(tmp_path / "edge.json", {"matching": [[0, 1]], "cycles": []}),
        "dir": tmp_path,
    }


@pytest.mark.parametrize("edges, needle", [
    ([[0, 0]], "self-loop"),
    ([[0, 1], [1, 0]], "duplicate edge"),
    ([[0, 5]], "out of range"),
])
def test_graph_parse_errors(tmp_path, capsys, edges, needle):
    g = tmp_path / "g.json"
    g.write_text('{"n": 3,\n "edges": [\n' + ",\n".join(json.dumps(e) for e in edges) + "]}")
    assert main(["diameter", "--graph", str(g)]) == 2
    err = capsys.readouterr().err
    assert needle in err and f"{g}:" in err


def test_malformed_json(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text("{nope")
    assert main(["diameter", "--graph", str(g)]) == 2
    assert "malformed JSON" in capsys.readouterr().err


def test_invalid_vertex(k3, capsys):
    bad = write(k3["dir"] / "bad.json", {"matching": [[0, 1], [1, 2]], "cycles": []})
    assert main(["path", "--graph", k3["graph"], "--from", bad, "--to", k3["half"]]) == 2
    assert "not a vertex" in capsys.readouterr().err


def test_unknown_flag_exits_2(k3):
    with pytest.raises(SystemExit) as exc:
        main(["diameter", "--graph", k3["graph"], "--bogus"])
    assert exc.value.code == 2


def test_diameter_and_bfs(k3, capsys):
    assert main(["diameter", "--graph", k3["graph"], "--cross-check"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["formula_value"] == "2" and rep["agreement"] is True
    assert main(["bfs-diameter", "--graph", k3["graph"]]) == 0
    assert json.loads(capsys.readouterr().out)["diameter"] == 2


def test_enumerate_and_skeleton(k3, capsys):
    assert main(["enumerate", "--graph", k3["graph"]]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 5
    assert main(["skeleton", "--graph", k3["graph"]]) == 0
    sk = json.loads(capsys.readouterr().out)
    assert len(sk["vertices"]) == 5 and len(sk["edges"]) > 0


def test_path_and_verify_round_trip(k3, capsys):
    cert = str(k3["dir"] / "cert.json")
    assert main(["path", "--graph", k3["graph"], "--from", k3["zero"], "--to", k3["half"],
                 "--paranoid", "--out", cert]) == 0
    assert main(["verify-cert", "--graph", k3["graph"], "--cert", cert]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verified"] and {c["check"] for c in out["checks"]} >= {"adjacency", "ledger", "bound"}


def _tamper(k3, fn):
    cert = k3["dir"] / "cert.json"
    main(["path", "--graph", k3["graph"], "--from", k3["zero"], "--to", k3["half"], "--out", str(cert)])
    obj = json.loads(cert.read_text())
    fn(obj)
    cert.write_text(json.dumps(obj))
    return str(cert)


def test_verify_detects_missing_payer(k3, capsys):
    def drop(obj):
        mv = obj["phases"][0]["moves"][0]
        mv["payers"] = mv["payers"][:1]
    cert = _tamper(k3, drop)
    capsys.readouterr()
    assert main(["verify-cert", "--graph", k3["graph"], "--cert", cert]) == 1
    details = [c.get("detail", "") for c in json.loads(capsys.readouterr().out)["checks"]]
    assert "ledger underflow at move 0" in details


def test_verify_detects_non_adjacent_step(k3, capsys):
    # zero to the half-cycle is not an edge of the skeleton on K3
    def skip(obj):
        obj["vertices"] = [obj["vertices"][0], obj["vertices"][-1]]
        first = obj["phases"][0]["moves"][0]
        for ph in obj["phases"]:
            ph["moves"] = []
        obj["phases"][0]["moves"] = [first]
    cert = _tamper(k3, skip)
    capsys.readouterr()
    assert main(["verify-cert", "--graph", k3["graph"], "--cert", cert]) == 1
    details = [c.get("detail", "") for c in json.loads(capsys.readouterr().out)["checks"]]
    assert "edge check failed at step 0" in details


def test_verify_edge(k3, capsys):
    assert main(["verify-edge", "--graph", k3["graph"], "--x", k3["zero"], "--y", k3["edge"], "--costs"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["rank_adjacent"] is True and out["structural_case"] is not None
    assert out["cost_certified"] == "verified"
    assert main(["verify-edge", "--graph", k3["graph"], "--x", k3["zero"], "--y", k3["half"]]) == 0
    assert json.loads(capsys.readouterr().out)["rank_adjacent"] is False


def test_pit_and_gadget(k3, capsys):
    assert main(["pit", "--graph", k3["graph"]]) == 0
    assert json.loads(capsys.readouterr().out) == {"answer": True, "diameter": "2", "partition": [[0, 1, 2]]}
    assert main(["gadget", "--graph", k3["graph"]]) == 0
    assert json.loads(capsys.readouterr().out)["graph"]["n"] == 24


def test_pit_rejects_bad_size(tmp_path, capsys):
    g = write(tmp_path / "g.json", {"n": 4, "edges": [[0, 1]]})
    assert main(["pit", "--graph", g]) == 2


def test_lreduce_zero_vertex(k3, capsys):
    w = write(k3["dir"] / "w.json", {"vertex": {"matching": [], "cycles": []}, "k_prime": 0})
    assert main(["lreduce", "--graph", k3["graph"], "--cert", w]) == 0


def test_corpus_is_idempotent(tmp_path, capsys):
    out = str(tmp_path / "c.jsonl")
    args = ["corpus", "--max-n", "4", "--count", "3", "--seed", "1", "--out", out]
    assert main(args) == 0
    first = open(out).read()
    s1 = json.loads(capsys.readouterr().out)["summary"]
    assert main(args) == 0
    assert open(out).read() == first
    assert json.loads(capsys.readouterr().out)["summary"] == s1
