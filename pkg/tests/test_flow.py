import random
from fractions import Fraction

import pytest

from frugal.errors import DomainError, InputError, MonopolyError
from frugal.flow import (FlowCoverSolver, conflict_graph, decompose_paths,
                         fm_run, min_cost_flow, nu_flow_fast,
                         prune_to_support, vc_from_flow)
from frugal.graph import Graph
from frugal.oracle import random_costs, random_flow_network
from frugal.setsystems import K_FLOW, SetSystem, nu, tot, unit_costs


def parallel(costs):
    ids = sorted(costs)
    g = Graph.build(["s", "t"], [(eid, "s", "t") for eid in ids],
                    source="s", sink="t")
    return g, {eid: Fraction(c) for eid, c in costs.items()}


def unit(g):
    return {e.id: Fraction(1) for e in g.edges}


def test_min_cost_flow_picks_cheapest():
    g, costs = parallel({"e1": 1, "e2": 2, "e3": 3})
    res = min_cost_flow(g, costs, 2)
    assert res.support == frozenset({"e1", "e2"})
    assert res.cost == 3


def test_min_cost_flow_tie_break_low_ids():
    g, costs = parallel({"e1": 1, "e2": 1, "e3": 1})
    assert min_cost_flow(g, costs, 2).support == frozenset({"e1", "e2"})


def test_min_cost_flow_uses_residual_reversal():
    # The greedy shortest path s->a->b->t must be undone to fit 2 units.
    g = Graph.build(
        ["s", "a", "b", "t"],
        [("sa", "s", "a"), ("ab", "a", "b"), ("bt", "b", "t"),
         ("sb", "s", "b"), ("at", "a", "t")],
        directed=True, source="s", sink="t")
    costs = {"sa": Fraction(1), "ab": Fraction(0), "bt": Fraction(1),
             "sb": Fraction(4), "at": Fraction(4)}
    res = min_cost_flow(g, costs, 2)
    assert res.support == frozenset({"sa", "at", "sb", "bt"})
    assert res.cost == 10


def test_min_cost_flow_infeasible(path_graph, path_costs):
    with pytest.raises(DomainError):
        min_cost_flow(path_graph, path_costs, 2)


def test_flow_input_validation(triangle):
    with pytest.raises(InputError):
        min_cost_flow(triangle, {e.id: Fraction(1) for e in triangle.edges}, 1)


def test_prune_keeps_three_flow(three_flow):
    h = prune_to_support(three_flow, unit(three_flow), 2)
    assert {e.id for e in h.edges} == {"u", "v", "w", "x", "y"}


def test_prune_monopoly(path_graph, path_costs):
    with pytest.raises(MonopolyError):
        prune_to_support(path_graph, path_costs, 1)


def test_decompose_three_flow(three_flow):
    paths = decompose_paths(three_flow, 3)
    assert sorted(map(sorted, paths)) == [["u"], ["v", "x"], ["w", "y"]]
    rev = decompose_paths(three_flow, 3, reverse=True)
    assert sorted(map(sorted, rev)) == sorted(map(sorted, paths))


def test_decompose_rejects_leftovers(three_flow):
    with pytest.raises(DomainError):
        decompose_paths(three_flow, 2)


def test_conflict_graph_matches_hand_derivation(three_flow):
    cg = conflict_graph(three_flow)
    pairs = {frozenset((e.tail, e.head)) for e in cg.edges}
    expected = {"uv", "uw", "ux", "uy", "vw", "xy", "vy", "wx"}
    assert pairs == {frozenset(p) for p in expected}


def test_conflict_graph_parallel_edges():
    g, _ = parallel({"e1": 0, "e2": 0})
    cg = conflict_graph(g)
    assert len(cg.edges) == 1


def test_flow_tot_is_k(three_flow):
    inst = vc_from_flow(three_flow, 2)
    assert all(v == Fraction(2) for v in inst.tot.values())
    sys = SetSystem(K_FLOW, three_flow, k=2)
    for eid in inst.agents:
        assert tot(sys, eid) == 2


def test_flow_solver_matches_enumeration(three_flow):
    solver = FlowCoverSolver(three_flow, 2)
    sys = SetSystem(K_FLOW, three_flow, k=2)
    rng = random.Random(5)
    for _ in range(20):
        costs = random_costs(rng, [e.id for e in three_flow.edges])
        covers = sys.minimal_feasible_sets
        best = min(sum(costs[a] for a in s) for s in covers)
        assert solver.min_cover(costs)[1] == best
        for agent in costs:
            want_in = min(sum(costs[a] for a in s if a != agent)
                          for s in covers)
            assert solver.min_cover_containing(agent, costs)[1] == want_in
            pool = [s for s in covers if agent not in s]
            want_out = min(sum(costs[a] for a in s) for s in pool)
            assert solver.min_cover_excluding(agent, costs)[1] == want_out


def test_fm_second_price():
    g, costs = parallel({"e1": 1, "e2": 3})
    out = fm_run(g, costs, 1)
    assert out.winners == frozenset({"e1"})
    assert out.payments["e1"] == pytest.approx(3.0, abs=1e-9)


def test_fm_winners_form_a_flow(three_flow):
    rng = random.Random(9)
    for _ in range(25):
        costs = random_costs(rng, [e.id for e in three_flow.edges])
        out = fm_run(three_flow, costs, 2)
        decompose_paths(three_flow.subgraph_edges(out.winners), 2)
        for w in out.winners:
            assert out.payments[w] >= float(costs[w]) - 1e-9


def test_fm_zero_costs(three_flow):
    costs = {e.id: Fraction(0) for e in three_flow.edges}
    out = fm_run(three_flow, costs, 2)
    assert out.total_payment == 0.0
    decompose_paths(three_flow.subgraph_edges(out.winners), 2)


def test_fm_pruned_losers_pay_zero():
    g, costs = parallel({"e1": 1, "e2": 2, "e3": 9})
    out = fm_run(g, costs, 1)
    assert out.payments["e3"] == 0.0
    assert "e3" not in out.winners
    assert out.diagnostics["pruned_support"] == ["e1", "e2"]


def test_nu_flow_fast_examples(three_flow):
    g, costs = parallel({"e1": 1, "e2": 3})
    assert nu_flow_fast(g, costs, 1) == 3
    assert nu_flow_fast(three_flow, unit(three_flow), 2) == 4
    zero = {e.id: Fraction(0) for e in three_flow.edges}
    assert nu_flow_fast(three_flow, zero, 2) == 0


def test_nu_flow_fast_rejects_non_flow(path_graph, path_costs):
    with pytest.raises(DomainError):
        nu_flow_fast(path_graph, path_costs, 1)


def test_nu_flow_fast_matches_lp(three_flow):
    rng = random.Random(13)
    sys = SetSystem(K_FLOW, three_flow, k=2)
    for _ in range(15):
        costs = random_costs(rng, [e.id for e in three_flow.edges])
        assert nu_flow_fast(three_flow, costs, 2) == nu(sys, costs).value


def test_pruning_bound_on_random_networks():
    rng = random.Random(21)
    done = 0
    while done < 15:
        g = random_flow_network(rng, 1, extra_edges=3)
        costs = random_costs(rng, [e.id for e in g.edges])
        try:
            h = prune_to_support(g, costs, 1)
        except MonopolyError:
            continue
        nu_h = nu(SetSystem(K_FLOW, h, k=1), costs_on(h, costs)).value
        nu_g = nu(SetSystem(K_FLOW, g, k=1), costs).value
        assert nu_h <= 2 * nu_g
        assert nu_flow_fast(h, costs_on(h, costs), 1) == nu_h
        done += 1


def costs_on(h, costs):
    return {e.id: costs[e.id] for e in h.edges}


def test_composability_of_pruning(three_flow):
    rng = random.Random(17)
    for _ in range(15):
        costs = random_costs(rng, [e.id for e in three_flow.edges])
        h = prune_to_support(three_flow, costs, 1)
        winner = sorted(e.id for e in h.edges)[0]
        lowered = dict(costs)
        lowered[winner] = costs[winner] / 2
        h2 = prune_to_support(three_flow, lowered, 1)
        assert {e.id for e in h.edges} == {e.id for e in h2.edges}
