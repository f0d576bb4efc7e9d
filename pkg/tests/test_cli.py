import json

import pytest

from frugal.cli import main


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


@pytest.fixture
def triangle_graph():
    return {
        "directed": False,
        "vertices": ["a", "b", "c"],
        "edges": [{"id": "ab", "tail": "a", "head": "b"},
                  {"id": "bc", "tail": "b", "head": "c"},
                  {"id": "ca", "tail": "c", "head": "a"}],
    }


@pytest.fixture
def path_json():
    return {
        "directed": True,
        "vertices": ["s", "a", "b", "t"],
        "source": "s", "sink": "t",
        "edges": [{"id": "sa", "tail": "s", "head": "a", "cost": "1"},
                  {"id": "ab", "tail": "a", "head": "b", "cost": "5"},
                  {"id": "bt", "tail": "b", "head": "t", "cost": "2"}],
    }


@pytest.fixture
def three_flow_json():
    return {
        "directed": True,
        "vertices": ["s", "a", "b", "t"],
        "source": "s", "sink": "t",
        "edges": [{"id": "u", "tail": "s", "head": "t", "cost": "1"},
                  {"id": "v", "tail": "s", "head": "a", "cost": "1"},
                  {"id": "w", "tail": "s", "head": "b", "cost": "1"},
                  {"id": "x", "tail": "a", "head": "t", "cost": "1"},
                  {"id": "y", "tail": "b", "head": "t", "cost": "1"}],
    }


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_nu_triangle(capsys, write, triangle_graph):
    system = write("sys.json", {"kind": "vertex-cover",
                                "graph": triangle_graph})
    costs = write("c.json", {"a": "1", "b": "0", "c": "0"})
    code, data = run(capsys, ["nu", "--system", system, "--costs", costs])
    assert code == 0
    assert data["nu"] == "2/1"
    assert data["winning_set"] == ["b", "c"]


def test_vc_auction(capsys, write, triangle_graph):
    graph = write("g.json", triangle_graph)
    bids = write("b.json", {"a": "1", "b": "0", "c": "0"})
    code, data = run(capsys, ["vc-auction", "--graph", graph,
                              "--bids", bids])
    assert code == 0
    assert data["approx"] is True
    assert data["winners"] == ["b", "c"]
    assert data["total_payment"] == pytest.approx(2.0)
    assert data["tot"] == {"a": "2/1", "b": "2/1", "c": "2/1"}


def test_flow_auction(capsys, write, three_flow_json):
    graph = write("g.json", three_flow_json)
    code, data = run(capsys, ["flow-auction", "--graph", graph, "-k", "2"])
    assert code == 0
    assert data["pruned_edges"] == ["u", "v", "w", "x", "y"]
    assert data["nu_H"] == "4/1"
    assert data["nu_G"] == "4/1"
    assert set(data["winners"]) <= {"u", "v", "w", "x", "y"}


def test_cut_auction(capsys, write, path_json):
    graph = write("g.json", path_json)
    code, data = run(capsys, ["cut-auction", "--graph", graph])
    assert code == 0
    assert data["double_cut"] == ["bt", "sa"]
    assert data["certified"] is True
    assert data["winners"] == ["sa"]
    assert data["payments"]["sa"] == pytest.approx(2.0)


def test_double_cut(capsys, write, path_json):
    graph = write("g.json", path_json)
    code, data = run(capsys, ["double-cut", "--graph", graph])
    assert code == 0
    assert data["cost"] == "3/1"
    assert data["certified"] is True
    assert data["flow_value"] == "2/1"
    assert data["relief_total"] == "1/1"


def test_explicit_costs_override_graph_costs(capsys, write, path_json):
    graph = write("g.json", path_json)
    costs = write("c.json", {"sa": "10", "ab": "1", "bt": "10"})
    code, data = run(capsys, ["double-cut", "--graph", graph,
                              "--costs", costs])
    assert code == 0
    assert data["double_cut"] == ["ab", "sa"] or data["double_cut"] == \
        ["ab", "bt"]
    assert data["cost"] == "11/1"


def test_verify_all(capsys):
    code, data = run(capsys, ["verify", "--suite", "all", "--seed", "7",
                              "--trials", "2"])
    assert code == 0
    assert data["ok"] is True
    assert set(data["suites"]) == {"vc", "flow", "cut"}


def test_frugality_vc(capsys):
    code, data = run(capsys, ["frugality", "--suite", "vc", "--seed", "5",
                              "--trials", "3"])
    assert code == 0
    assert data["ok"] is True
    assert data["certified_bound"] == "lambda * sum(c_v * tot_v)"
    assert data["worst_ratio"] > 0


def test_determinism(capsys, write, path_json):
    graph = write("g.json", path_json)
    outputs = []
    for _ in range(2):
        main(["cut-auction", "--graph", graph])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    runs = []
    for _ in range(2):
        main(["verify", "--suite", "vc", "--seed", "3", "--trials", "2"])
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]


def test_domain_error_exit_code(capsys, write):
    graph = write("g.json", {
        "directed": True, "vertices": ["s", "t"],
        "source": "s", "sink": "t",
        "edges": [{"id": "st", "tail": "s", "head": "t", "cost": "1"}]})
    code = main(["cut-auction", "--graph", graph])
    assert code == 1


def test_input_error_exit_code(capsys, tmp_path):
    missing = str(tmp_path / "nope.json")
    assert main(["nu", "--system", missing, "--costs", missing]) == 1


def test_scale_error_exit_code(capsys, write, monkeypatch):
    monkeypatch.setenv("FRUGAL_SCALE_CAP", "2")
    graph = write("g.json", {
        "directed": False,
        "vertices": ["a", "b", "c", "d"],
        "edges": [{"id": "ab", "tail": "a", "head": "b"},
                  {"id": "bc", "tail": "b", "head": "c"},
                  {"id": "cd", "tail": "c", "head": "d"}]})
    bids = write("b.json", {"a": "1", "b": "1", "c": "1", "d": "1"})
    code = main(["vc-auction", "--graph", graph, "--bids", bids])
    assert code == 2
