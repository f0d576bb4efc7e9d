"""The k-flow auction.

The buyer wants k edge-disjoint s-t paths. The mechanism first prunes
the network to H, the support of a min-cost (k+1)-flow; inside H the
minimal k-flows are exactly the minimal vertex covers of a conflict
graph on H's edges, so the eigenvector cover auction applies directly.
Every Tot value in that instance is k, which makes the conflict graph's
spectral bound the frugality guarantee.

Costs may be Fractions (exact pruning, nu) or floats (scaled bids from
the cover auction); the flow routines are agnostic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import caps
from .errors import DomainError, InputError, MonopolyError, ScaleError
from .eigen import AuctionOutcome, VcInstance, build_vc_instance, ev_run
from .graph import Graph, enumerate_st_paths, reachable


def _check_flow_input(g: Graph, costs: dict):
    if not g.directed:
        raise InputError("flow networks must be directed")
    if g.source is None or g.sink is None:
        raise InputError("flow networks need designated s, t")
    for e in g.edges:
        if e.id not in costs:
            raise InputError(f"missing cost for edge {e.id!r}")
        if costs[e.id] < 0:
            raise InputError(f"negative cost for edge {e.id!r}")
        if e.tail == e.head:
            raise InputError(f"self-loop {e.id!r} not allowed in flow networks")


@dataclass(frozen=True)
class MinCostFlowResult:
    support: frozenset  # edge ids carrying one unit
    cost: object  # Fraction or float, total main cost over the support


def min_cost_flow(g: Graph, costs: dict, k: int) -> MinCostFlowResult:
    """Min-cost flow of value k under unit capacities.

    Successive shortest augmenting paths. Each edge's cost is perturbed
    by an infinitesimal unique to that edge, so every shortest path is
    strictly unique and the optimum is deterministic regardless of input
    order. Raises DomainError when fewer than k disjoint paths exist.
    """
    _check_flow_input(g, costs)
    # Highest id gets the lexicographically dominant perturbation slot,
    # so ties favor flows that avoid high-id edges.
    order = sorted((e.id for e in g.edges), reverse=True)
    idx = {eid: i for i, eid in enumerate(order)}
    n_e = len(order)
    zero_eps = (0,) * n_e

    def eps(eid: str, sign: int):
        vec = [0] * n_e
        vec[idx[eid]] = sign
        return tuple(vec)

    flow: dict[str, int] = {eid: 0 for eid in order}
    for _ in range(k):
        pred = _bellman_ford(g, costs, flow, eps, zero_eps)
        if pred is None:
            raise DomainError(f"network does not support {k} edge-disjoint paths")
        v = g.sink
        while v != g.source:
            eid, forward = pred[v]
            e = g.edge_by_id[eid]
            if forward:
                flow[eid] = 1
                v = e.tail
            else:
                flow[eid] = 0
                v = e.head
    support = frozenset(eid for eid, f in flow.items() if f)
    total = sum(costs[eid] for eid in support)
    return MinCostFlowResult(support, total)


def _bellman_ford(g: Graph, costs, flow, eps, zero_eps):
    """Shortest s-t path in the residual graph under perturbed costs.

    Returns pred: vertex -> (edge id, is_forward), or None when the sink
    is unreachable. Arc costs are (main, eps-vector) pairs compared
    lexicographically; the eps vectors are distinct per edge so distinct
    paths never tie.
    """
    arcs = []  # (tail, head, edge id, forward?)
    for eid in sorted(flow):
        e = g.edge_by_id[eid]
        if flow[eid] == 0:
            arcs.append((e.tail, e.head, eid, True))
        else:
            arcs.append((e.head, e.tail, eid, False))
    dist = {v: None for v in g.vertices}
    dist[g.source] = (0, zero_eps)
    pred: dict[str, tuple[str, bool]] = {}
    for _ in range(len(g.vertices) - 1):
        changed = False
        for tail, head, eid, forward in arcs:
            if dist[tail] is None:
                continue
            sign = 1 if forward else -1
            main, vec = dist[tail]
            cand = (main + sign * costs[eid],
                    tuple(a + b for a, b in zip(vec, eps(eid, sign))))
            if dist[head] is None or cand < dist[head]:
                dist[head] = cand
                pred[head] = (eid, forward)
                changed = True
        if not changed:
            break
    if dist[g.sink] is None:
        return None
    return pred


def prune_to_support(g: Graph, costs: dict, k: int) -> Graph:
    """H: the subgraph on the support of a min-cost (k+1)-flow."""
    if len(g.edges) > caps.cap(caps.FLOW_EDGE_CAP):
        raise ScaleError(f"flow auctions capped at "
                         f"{caps.cap(caps.FLOW_EDGE_CAP)} edges")
    try:
        result = min_cost_flow(g, costs, k + 1)
    except DomainError as exc:
        raise MonopolyError(
            f"need {k + 1} edge-disjoint paths for a monopoly-free "
            f"{k}-flow auction") from exc
    return g.subgraph_edges(result.support)


def decompose_paths(g: Graph, k: int, reverse: bool = False) -> list[list[str]]:
    """Partition g's edges into k edge-disjoint simple s-t paths.

    Backtracking search; `reverse` flips the edge exploration order
    (useful for checking decomposition independence). DomainError when
    no such partition exists.
    """
    remaining = {e.id for e in g.edges}
    paths: list[list[str]] = []

    def out_order(v):
        es = [e for e in g.out_edges(v) if e.id in remaining]
        return list(reversed(es)) if reverse else es

    def walk(v, visited, trail):
        if v == g.sink:
            if finish(list(trail)):
                return True
            # A path may also continue through the sink? No: simple
            # s-t paths end at t. Fall through to try longer... t has
            # no continuation by definition here.
            return False
        for e in out_order(v):
            if e.head in visited:
                continue
            remaining.discard(e.id)
            trail.append(e.id)
            visited.add(e.head)
            if walk(e.head, visited, trail):
                return True
            visited.discard(e.head)
            trail.pop()
            remaining.add(e.id)
        return False

    def finish(trail):
        paths.append(trail)
        if len(paths) == k:
            if not remaining:
                return True
            paths.pop()
            return False
        if walk(g.source, {g.source}, []):
            return True
        paths.pop()
        return False

    if k == 0:
        if remaining:
            raise DomainError("leftover edges with zero paths requested")
        return []
    if not walk(g.source, {g.source}, []):
        raise DomainError(
            f"edge set does not split into {k} edge-disjoint simple paths")
    return paths


def conflict_graph(h: Graph) -> Graph:
    """Edges of h become vertices; two conflict when no k-flow can use
    both, i.e. neither one's head reaches the other's tail in h."""
    ids = sorted(e.id for e in h.edges)
    edges = []
    for a, b in itertools.combinations(ids, 2):
        ea, eb = h.edge_by_id[a], h.edge_by_id[b]
        if not reachable(h, ea.head, eb.tail) and not reachable(h, eb.head, ea.tail):
            edges.append((f"{a}|{b}", a, b))
    return Graph.build(ids, edges, directed=False)


class FlowCoverSolver:
    """Cover queries answered by min-cost k-flow computations.

    Minimal vertex covers of the conflict graph are exactly the minimal
    k-flows inside H, so each query reduces to one flow computation:
    containment prices the pinned edge at zero, exclusion deletes it.
    """

    def __init__(self, h: Graph, k: int):
        self.h = h
        self.k = k

    def min_cover(self, costs):
        res = min_cost_flow(self.h, costs, self.k)
        return res.support, res.cost

    def min_cover_containing(self, agent, costs):
        pinned = dict(costs)
        pinned[agent] = 0 * pinned[agent]
        res = min_cost_flow(self.h, pinned, self.k)
        return res.support | {agent}, res.cost

    def min_cover_excluding(self, agent, costs):
        rest = [e.id for e in self.h.edges if e.id != agent]
        res = min_cost_flow(self.h.subgraph_edges(rest), costs, self.k)
        return res.support, res.cost


@lru_cache(maxsize=256)
def _flow_vc_instance(h: Graph, k: int) -> VcInstance:
    # Validate that h really is a (k+1)-path support before trusting
    # the cover correspondence.
    decompose_paths(h, k + 1)
    cg = conflict_graph(h)
    tot = {eid: Fraction(k) for eid in cg.vertices}
    return build_vc_instance(cg, tot, solver=FlowCoverSolver(h, k))


def vc_from_flow(h: Graph, k: int) -> VcInstance:
    """The cover-auction instance induced by a pruned flow network."""
    return _flow_vc_instance(h, k)


def _pruning_threshold(g: Graph, costs: dict, k: int, agent: str):
    """Highest bid at which `agent` stays inside the min-cost
    (k+1)-flow, with everyone else's bids fixed. None when dropping
    the agent disconnects the flow (the bid never prices it out)."""
    free = dict(costs)
    free[agent] = Fraction(0)
    contained = min_cost_flow(g, free, k + 1).cost
    without = g.subgraph_edges(e.id for e in g.edges if e.id != agent)
    try:
        avoiding = min_cost_flow(without, costs, k + 1).cost
    except DomainError:
        return None
    return avoiding - contained


def fm_run(g: Graph, costs: dict, k: int) -> AuctionOutcome:
    """Run the full flow auction: prune, reduce to covers, pay thresholds.

    Winners form a k-flow. Edges pruned out of H lose at price 0.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    _check_flow_input(g, costs)
    h = prune_to_support(g, costs, k)
    inst = vc_from_flow(h, k)
    bids = {e.id: costs[e.id] for e in h.edges}
    outcome = ev_run(inst, bids)
    payments = {e.id: 0.0 for e in g.edges}
    payments.update(outcome.payments)
    # A winner's threshold is the smaller of two exits: losing the
    # cover auction inside H, or bidding itself out of the min-cost
    # (k+1)-flow that defines H. Cap each payment by the latter.
    for winner in outcome.winners:
        tau = _pruning_threshold(g, costs, k, winner)
        if tau is not None:
            payments[winner] = min(payments[winner], float(tau))
    diagnostics = dict(outcome.diagnostics)
    diagnostics["pruned_support"] = sorted(e.id for e in h.edges)
    total = sum(payments[w] for w in outcome.winners)
    return AuctionOutcome(outcome.winners, payments, total, diagnostics)


def nu_flow_fast(h: Graph, costs: dict, k: int) -> Fraction:
    """The Nash bound for a k-flow system on a (k+1)-flow graph,
    without solving the LP.

    When every edge of h lies on one of k+1 edge-disjoint s-t paths,
    all equilibria equalize total bids across s-t paths at the cost of
    the most expensive one, so the bound is k times that path cost.
    DomainError when h is not a (k+1)-flow.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    _check_flow_input(h, costs)
    decompose_paths(h, k + 1)
    worst = max(sum(costs[eid] for eid in p) for p in enumerate_st_paths(h))
    return k * worst
