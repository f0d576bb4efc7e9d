import json
from fractions import Fraction

import pytest

from frugal.errors import InputError, ScaleError
from frugal.graph import (Edge, Graph, contract_edges, enumerate_st_paths,
                          graph_from_json, graph_to_json, reachable)


def test_duplicate_vertex_rejected():
    with pytest.raises(InputError):
        Graph.build(["a", "a"], [])


def test_duplicate_edge_id_rejected():
    with pytest.raises(InputError):
        Graph.build(["a", "b"], [("e", "a", "b"), ("e", "b", "a")])


def test_unknown_endpoint_rejected():
    with pytest.raises(InputError):
        Graph.build(["a"], [("e", "a", "z")])


def test_source_must_differ_from_sink():
    with pytest.raises(InputError):
        Graph.build(["a", "b"], [], source="a", sink="a")


def test_parallel_edges_are_fine():
    g = Graph.build(["a", "b"], [("e1", "a", "b"), ("e2", "a", "b")])
    assert len(g.edges) == 2
    assert [e.id for e in g.out_edges("a")] == ["e1", "e2"]


def test_undirected_adjacency_goes_both_ways():
    g = Graph.build(["a", "b"], [("e", "a", "b")], directed=False)
    assert g.out_edges("b") == (Edge("e", "b", "a"),)
    assert g.neighbors("a") == ["b"]


def test_st_paths_lexicographic(three_flow):
    paths = enumerate_st_paths(three_flow)
    assert paths == [["u"], ["v", "x"], ["w", "y"]]


def test_st_path_cap():
    g = Graph.build(["s", "t"],
                    [("e1", "s", "t"), ("e2", "s", "t"), ("e3", "s", "t")],
                    source="s", sink="t")
    with pytest.raises(ScaleError):
        enumerate_st_paths(g, path_cap=2)


def test_st_paths_need_endpoints(triangle):
    with pytest.raises(InputError):
        enumerate_st_paths(triangle)


def test_reachable(path_graph):
    assert reachable(path_graph, "s", "t")
    assert reachable(path_graph, "b", "b")
    assert not reachable(path_graph, "t", "s")


def test_contract_names_block_by_min_member(path_graph):
    contracted, vmap = contract_edges(path_graph, {"sa", "bt"})
    assert vmap["a"] == vmap["b"] == "a"
    assert set(contracted.vertices) == {"s", "a", "t"}
    assert {e.id for e in contracted.edges} == {"sa", "bt"}
    assert contracted.source == "s" and contracted.sink == "t"


def test_contract_keeps_self_loops():
    g = Graph.build(["a", "b", "c"],
                    [("ab", "a", "b"), ("ba", "b", "a"), ("bc", "b", "c")])
    contracted, _ = contract_edges(g, {"ab", "bc"})
    loop = contracted.edge_by_id["ab"]
    assert loop.tail == loop.head


def test_contract_refuses_to_merge_terminals(path_graph):
    with pytest.raises(InputError):
        contract_edges(path_graph, set())


def test_contract_unknown_edge(path_graph):
    with pytest.raises(InputError):
        contract_edges(path_graph, {"nope"})


def test_subgraph_edges_keeps_terminals(three_flow):
    sub = three_flow.subgraph_edges({"v", "x"})
    assert set(sub.vertices) == {"s", "a", "t"}
    assert sub.source == "s"


def test_json_round_trip(three_flow):
    costs = {e.id: Fraction(1, 3) for e in three_flow.edges}
    data = graph_to_json(three_flow, costs)
    g2, c2 = graph_from_json(json.loads(json.dumps(data)))
    assert g2 == three_flow
    assert c2 == costs


def test_json_missing_key():
    with pytest.raises(InputError):
        graph_from_json({"vertices": ["a"]})


def test_json_bad_edge_entry():
    with pytest.raises(InputError):
        graph_from_json({"vertices": ["a"], "edges": [{"id": "e"}]})
