"""The s-t cut auction.

The pre-processing step buys a minimum-cost double cut: an edge set
meeting every s-t path at least twice. Contracting everything else
collapses the graph to parallel bundles E_i (s to v_i) and E_i' (v_i
to t); an s-t cut must take a full side of every bundle, which is a
vertex cover of a disjoint union of complete bipartite graphs. The
eigenvector cover auction finishes the job with Tot identically 1.

The double cut itself comes from a primal-dual relief-flow algorithm
(a Ford-Fulkerson extension where saturated edges can still carry flow
at a price), certified optimal by weak duality against the exact dual
objective, with an exact LP fallback.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .errors import DomainError, InputError, MonopolyError
from .eigen import AuctionOutcome, VcInstance, build_vc_instance, ev_run
from .graph import Graph, enumerate_st_paths, reachable
from .lp import GEQ, LEQ, LinearProgram, solve

MAX_RELIEF_ITERATIONS = 10_000

ZERO = Fraction(0)


def _check_cut_input(g: Graph, costs: dict):
    if not g.directed:
        raise InputError("cut auctions need a directed graph")
    if g.source is None or g.sink is None:
        raise InputError("cut auctions need designated s, t")
    for e in g.edges:
        if e.id not in costs:
            raise InputError(f"missing cost for edge {e.id!r}")
        if costs[e.id] < 0:
            raise InputError(f"negative cost for edge {e.id!r}")
        if e.tail == e.head:
            raise InputError(f"self-loop {e.id!r} not allowed")
        if e.tail == g.source and e.head == g.sink:
            raise MonopolyError(f"edge {e.id!r} runs source to sink; "
                                f"no agent may be in every cut")
    if not reachable(g, g.source, g.sink):
        raise DomainError("sink is unreachable; the cut system is trivial")


@dataclass(frozen=True)
class DoubleCutResult:
    double_cut: frozenset  # edge ids
    cost: Fraction
    dual_objective: Fraction
    certified: bool
    method: str  # "primal-dual" | "lp-fallback"
    cuts: Optional[tuple[frozenset, frozenset]]  # (S1, S2) vertex sides
    flow_value: Optional[Fraction] = None
    relief_total: Optional[Fraction] = None


def is_double_cut(g: Graph, edge_ids: frozenset) -> bool:
    """True iff every s-t path uses at least two of the given edges.

    Computed as a 0-1 shortest path (chosen edges weigh 1)."""
    dist = {v: None for v in g.vertices}
    dist[g.source] = 0
    dq = deque([g.source])
    while dq:
        v = dq.popleft()
        for e in g.out_edges(v):
            w = 1 if e.id in edge_ids else 0
            nd = dist[v] + w
            if dist[e.head] is None or nd < dist[e.head]:
                dist[e.head] = nd
                if w:
                    dq.append(e.head)
                else:
                    dq.appendleft(e.head)
    return dist[g.sink] is None or dist[g.sink] >= 2


def _max_flow(g: Graph, costs: dict) -> dict:
    """Edmonds-Karp max flow with the costs as capacities."""
    f = {e.id: ZERO for e in g.edges}
    while True:
        pred = {}
        seen = {g.source}
        dq = deque([g.source])
        while dq and g.sink not in seen:
            v = dq.popleft()
            for e in g.out_edges(v):
                if e.head not in seen and f[e.id] < costs[e.id]:
                    seen.add(e.head)
                    pred[e.head] = (e.id, True)
                    dq.append(e.head)
            for e in g.edges:
                if e.head == v and e.tail not in seen and f[e.id] > 0:
                    seen.add(e.tail)
                    pred[e.tail] = (e.id, False)
                    dq.append(e.tail)
        if g.sink not in seen:
            return f
        path = []
        v = g.sink
        while v != g.source:
            eid, fwd = pred[v]
            path.append((eid, fwd))
            e = g.edge_by_id[eid]
            v = e.tail if fwd else e.head
        delta = min((costs[eid] - f[eid]) if fwd else f[eid]
                    for eid, fwd in path)
        for eid, fwd in path:
            f[eid] += delta if fwd else -delta


def _residual_arcs(g: Graph, costs, f, r):
    """Arcs of the relief residual graph with their lengths.

    Forward arcs always exist (saturated edges have length 1);
    backward arcs exist for flow-carrying edges (length -1 when the
    edge holds positive relief)."""
    arcs = []  # (tail, head, eid, forward, length)
    for e in sorted(g.edges, key=lambda e: e.id):
        saturated = f[e.id] == costs[e.id] + r[e.id]
        arcs.append((e.tail, e.head, e.id, True, 1 if saturated else 0))
        if f[e.id] > 0:
            arcs.append((e.head, e.tail, e.id, False, -1 if r[e.id] > 0 else 0))
    return arcs


def _shortest_by_length(arcs, vertices, src):
    """Bellman-Ford under lexicographic (length, hop count) weights.

    Safe because no residual graph in this algorithm has a cycle of
    negative total length. Returns (dist, pred)."""
    dist = {v: None for v in vertices}
    dist[src] = (0, 0)
    pred = {}
    for _ in range(len(vertices)):
        changed = False
        for tail, head, eid, fwd, length in arcs:
            if dist[tail] is None:
                continue
            cand = (dist[tail][0] + length, dist[tail][1] + 1)
            if dist[head] is None or cand < dist[head]:
                dist[head] = cand
                pred[head] = (eid, fwd, tail)
                changed = True
        if not changed:
            return dist, pred
    raise DomainError("negative cycle in relief residual graph")


def _augment(g: Graph, costs, f, r, pred) -> None:
    """Push flow along the predecessor path, adding relief on saturated
    edges and draining it on backward edges, up to the first event that
    lengthens the path (new saturation or relief hitting zero)."""
    path = []
    v = g.sink
    while v != g.source:
        eid, fwd, tail = pred[v]
        path.append((eid, fwd))
        v = tail
    bounds = []
    for eid, fwd in path:
        if fwd:
            slack = costs[eid] + r[eid] - f[eid]
            if slack > 0:
                bounds.append(slack)
        else:
            bounds.append(r[eid] if r[eid] > 0 else f[eid])
    if not bounds:
        raise DomainError("unbounded augmentation; graph admits a monopoly")
    delta = min(bounds)
    for eid, fwd in path:
        if fwd:
            if f[eid] == costs[eid] + r[eid]:
                r[eid] += delta
            f[eid] += delta
        else:
            if r[eid] > 0:
                r[eid] -= delta
            f[eid] -= delta


def _flow_value(g: Graph, f) -> Fraction:
    return sum((f[e.id] for e in g.edges if e.tail == g.source), ZERO) - \
        sum((f[e.id] for e in g.edges if e.head == g.source), ZERO)


def _relief_flow(g: Graph, costs):
    """Run the relief-augmentation loop to dual optimality.

    Returns (f, r) or None when the iteration guard trips."""
    f = _max_flow(g, costs)
    r = {e.id: ZERO for e in g.edges}
    for _ in range(MAX_RELIEF_ITERATIONS):
        arcs = _residual_arcs(g, costs, f, r)
        dist, pred = _shortest_by_length(arcs, g.vertices, g.source)
        if dist[g.sink] is None or dist[g.sink][0] > 1:
            return f, r
        _augment(g, costs, f, r, pred)
    return None


def _cut_candidates(g: Graph, costs, f, r):
    """Vertex-side pairs (S1, S2) to try as the two nested cuts.

    Distances live in the residual graph minus zero-flow forward arcs.
    S1 takes everything at distance <= 0. The preferred S2 complements
    the set of vertices that reach, at length <= 0, a vertex between a
    positive-distance relief edge and the sink; the simpler backstop is
    the distance <= 1 threshold."""
    arcs = [(a, b, eid, fwd, ln)
            for a, b, eid, fwd, ln in _residual_arcs(g, costs, f, r)
            if not (fwd and f[eid] == 0)]
    dist, _ = _shortest_by_length(arcs, g.vertices, g.source)

    def d(v):
        return dist[v][0] if dist[v] is not None else None

    s1 = frozenset(v for v in g.vertices if d(v) is not None and d(v) <= 0)
    unreached = frozenset(v for v in g.vertices if dist[v] is None)
    candidates = []

    relief_far = [g.edge_by_id[eid] for eid in sorted(r)
                  if r[eid] > 0 and (d(g.edge_by_id[eid].tail) is None
                                     or d(g.edge_by_id[eid].tail) > 0)]
    if relief_far:
        adj: dict[str, list[str]] = {v: [] for v in g.vertices}
        for a, b, *_ in arcs:
            adj[a].append(b)

        def reach_set(start, skip_sink_exits=False):
            seen = {start}
            dq = deque([start])
            while dq:
                v = dq.popleft()
                if skip_sink_exits and v == g.sink:
                    continue
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        dq.append(w)
            return seen

        to_sink = {v for v in g.vertices if g.sink in reach_set(v)}
        u_set = set()
        for e in relief_far:
            # Vertices on a head-to-sink path; walks may not revisit
            # the sink, else cycles through t pollute the set.
            u_set |= reach_set(e.head, skip_sink_exits=True) & to_sink
        s2_bar = set()
        for y in sorted(g.vertices):
            dy, _ = _shortest_by_length(arcs, g.vertices, y)
            if any(dy[w] is not None and dy[w][0] <= 0 for w in u_set):
                s2_bar.add(y)
        candidates.append((s1, frozenset(set(g.vertices) - s2_bar)))

    near = frozenset(v for v in g.vertices
                     if d(v) is not None and d(v) <= 1)
    candidates.append((s1, near | unreached))
    candidates.append((s1, near))
    return candidates


def _crossing(g: Graph, side) -> frozenset:
    return frozenset(e.id for e in g.edges
                     if e.tail in side and e.head not in side)


def _certified_cut(g: Graph, costs, s1, s2, dual_obj):
    if g.source not in s1 or g.sink in s1:
        return None
    if g.source not in s2 or g.sink in s2:
        return None
    c1, c2 = _crossing(g, s1), _crossing(g, s2)
    if c1 & c2:
        return None
    d = c1 | c2
    if not is_double_cut(g, d):
        return None
    if sum((costs[eid] for eid in d), ZERO) != dual_obj:
        return None
    return d


def double_cut_lp(g: Graph, costs: dict) -> tuple[frozenset, Fraction]:
    """Exact LP for the minimum double cut.

    min c.x with every s-t path covered twice and x in [0,1]; the
    constraint matrix is totally unimodular so the simplex vertex is
    integral."""
    order = sorted(e.id for e in g.edges)
    idx = {eid: i for i, eid in enumerate(order)}
    rows = []
    for path in enumerate_st_paths(g):
        coeffs = [ZERO] * len(order)
        for eid in path:
            coeffs[idx[eid]] = Fraction(1)
        rows.append((coeffs, GEQ, Fraction(2)))
    for i in range(len(order)):
        coeffs = [ZERO] * len(order)
        coeffs[i] = Fraction(1)
        rows.append((coeffs, LEQ, Fraction(1)))
    lp = LinearProgram.build([-costs[eid] for eid in order], rows)
    sol = solve(lp)
    if sol.status != "optimal":
        raise DomainError(f"double cut LP is {sol.status}")
    chosen = set()
    for eid, x in zip(order, sol.assignment):
        if x not in (0, 1):
            raise DomainError("double cut LP returned a fractional vertex")
        if x == 1:
            chosen.add(eid)
    return frozenset(chosen), -sol.value


def min_double_cut(g: Graph, costs: dict,
                   canonical: bool = False) -> DoubleCutResult:
    """Minimum-cost edge set meeting every s-t path at least twice.

    Primal-dual first; any failure to certify the relief flow's
    complementary slackness falls back to the exact LP.

    With `canonical=True` ties between equally cheap double cuts are
    broken by a fixed rule (greedily exclude edges in ascending id
    order whenever an equally cheap double cut avoids them), so the
    chosen edge set depends only on the cost vector, never on how the
    optimum was found. The auction needs this: an agent's bid must not
    be able to steer which of two tied double cuts gets selected."""
    base = _min_double_cut_any(g, costs)
    if not canonical:
        return base
    big = sum((costs[e.id] for e in g.edges), ZERO) + 1
    working = dict(costs)
    for eid in sorted(e.id for e in g.edges):
        trial = dict(working)
        trial[eid] = big
        r = _min_double_cut_any(g, trial)
        # r.cost uses the trial prices, so equality with the true
        # optimum also certifies r avoids every excluded edge.
        if eid not in r.double_cut and r.cost == base.cost:
            working = trial
    final = _min_double_cut_any(g, working)
    return final


def _min_double_cut_any(g: Graph, costs: dict) -> DoubleCutResult:
    _check_cut_input(g, costs)
    state = _relief_flow(g, costs)
    if state is not None:
        f, r = state
        flow_value = _flow_value(g, f)
        relief_total = sum(r.values(), ZERO)
        dual_obj = 2 * flow_value - relief_total
        for s1, s2 in _cut_candidates(g, costs, f, r):
            d = _certified_cut(g, costs, s1, s2, dual_obj)
            if d is not None:
                cost = sum((costs[eid] for eid in d), ZERO)
                return DoubleCutResult(d, cost, dual_obj, True, "primal-dual",
                                       (s1, s2), flow_value, relief_total)
    chosen, value = double_cut_lp(g, costs)
    return DoubleCutResult(chosen, value, value, True, "lp-fallback", None)


def prune_redundant(g: Graph, costs: dict, d: frozenset) -> frozenset:
    """Drop zero-cost edges whose removal keeps d a double cut.

    Positive-cost edges in a minimum double cut are never redundant,
    so this restores inclusion-minimality without changing the cost.
    Edges are tried in ascending id order for determinism."""
    out = set(d)
    for eid in sorted(d):
        if costs[eid] == 0 and is_double_cut(g, frozenset(out - {eid})):
            out.discard(eid)
    return frozenset(out)


@dataclass(frozen=True)
class BundleStructure:
    h: Graph
    # one entry per middle block v_i: (v_i, E_i edge ids, E_i' edge ids)
    bundles: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]

    @property
    def middles(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.bundles)

    @property
    def sides(self) -> dict:
        return {v: (left, right) for v, left, right in self.bundles}


def _directed_reach(edges, start: str, forward: bool) -> set:
    adj: dict[str, list[str]] = {}
    for e in edges:
        a, b = (e.tail, e.head) if forward else (e.head, e.tail)
        adj.setdefault(a, []).append(b)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def contract_to_h(g: Graph, d: frozenset) -> BundleStructure:
    """Collapse everything outside d and classify the d edges into
    source-side and sink-side bundles.

    Blocks are derived from d itself: the source block holds every
    vertex reachable from s without crossing d, the sink block every
    vertex that reaches t without crossing d, and each remaining
    connected component (under non-d edges) becomes one middle block.
    Deriving the blocks this way keeps backward non-d edges from
    merging the source and sink blocks spuriously, and makes the
    result depend only on (g, d), not on how d was found.

    DomainError when d has no two-level form: d-edges inside a block
    or between two middle blocks, direct s-t edges, edges running
    backward between blocks, or one-sided bundles."""
    unknown = set(d) - set(g.edge_by_id)
    if unknown:
        raise InputError(f"unknown edge ids: {sorted(unknown)}")
    s, t = g.source, g.sink
    residual = [e for e in g.edges if e.id not in d]
    s_block = _directed_reach(residual, s, forward=True)
    t_block = _directed_reach(residual, t, forward=False)
    if s_block & t_block:
        raise DomainError("an s-t path avoids the edge set entirely; "
                          "it is not a double cut")

    # Union non-d edges among the leftover vertices into middle blocks,
    # named by their smallest member.
    parent = {v: v for v in g.vertices if v not in s_block | t_block}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in residual:
        if e.tail in parent and e.head in parent:
            ra, rb = find(e.tail), find(e.head)
            if ra != rb:
                parent[rb] = ra
    groups: dict[str, list[str]] = {}
    for v in parent:
        groups.setdefault(find(v), []).append(v)
    name = {root: min(members) for root, members in groups.items()}

    def block(v):
        if v in s_block:
            return s
        if v in t_block:
            return t
        return name[find(v)]

    sides: dict[str, tuple[list, list]] = {}
    h_edges = []
    for eid in sorted(d):
        e = g.edge_by_id[eid]
        tail, head = block(e.tail), block(e.head)
        h_edges.append((e.id, tail, head))
        if tail == head:
            raise DomainError(f"edge {e.id!r} lies inside a contracted block; "
                              f"the double cut is not minimal")
        if tail == s and head == t:
            raise DomainError("contracted graph has a direct s-t edge")
        if head == s or tail == t:
            raise DomainError(f"edge {e.id!r} runs backward between blocks; "
                              f"the double cut is not minimal")
        if tail == s:
            sides.setdefault(head, ([], []))[0].append(e.id)
        elif head == t:
            sides.setdefault(tail, ([], []))[1].append(e.id)
        else:
            raise DomainError(f"edge {e.id!r} connects two middle blocks; "
                              f"the double cut is not minimal")
    h = Graph.build(sorted({s, t, *(v for v in sides)}), h_edges,
                    directed=True, source=s, sink=t)
    for v, (left, right) in sides.items():
        if not left or not right:
            raise DomainError(f"block {v!r} has a one-sided bundle; "
                              f"the double cut is not minimal")
    tidy = tuple((v, tuple(sorted(sides[v][0])), tuple(sorted(sides[v][1])))
                 for v in sorted(sides))
    return BundleStructure(h, tidy)


def cut_conflict_graph(bundles: BundleStructure) -> Graph:
    """Disjoint union of complete bipartite graphs: one per bundle,
    pairing each source-side edge with each sink-side edge."""
    ids = sorted(e.id for e in bundles.h.edges)
    edges = []
    for v in bundles.middles:
        left, right = bundles.sides[v]
        for a, b in itertools.product(left, right):
            lo, hi = sorted((a, b))
            edges.append((f"{lo}|{hi}", lo, hi))
    return Graph.build(ids, edges, directed=False)


class CutCoverSolver:
    """Cover queries on a disjoint union of complete bipartite bundles.

    A cover picks one full side per bundle, so every query decomposes
    into independent per-bundle side choices."""

    def __init__(self, bundles: BundleStructure):
        self.bundles = bundles
        self.side_of = {}
        for v in bundles.middles:
            left, right = bundles.sides[v]
            for eid in left:
                self.side_of[eid] = (v, 0)
            for eid in right:
                self.side_of[eid] = (v, 1)

    def _pick(self, costs, pinned=None, banned=None):
        chosen = []
        total = None
        for v in self.bundles.middles:
            options = []
            for side in (0, 1):
                ids = self.bundles.sides[v][side]
                if banned is not None and banned in ids:
                    continue
                cost = sum(costs[i] for i in ids if i != pinned)
                options.append((cost, ids))
            cost, ids = min(options)
            chosen.extend(ids)
            total = cost if total is None else total + cost
        if pinned is not None and pinned not in chosen:
            chosen.append(pinned)
        return frozenset(chosen), (total if total is not None else 0)

    def min_cover(self, costs):
        return self._pick(costs)

    def min_cover_containing(self, agent, costs):
        return self._pick(costs, pinned=agent)

    def min_cover_excluding(self, agent, costs):
        return self._pick(costs, banned=agent)


@lru_cache(maxsize=256)
def _cut_vc_instance(bundles: BundleStructure) -> VcInstance:
    cg = cut_conflict_graph(bundles)
    tot = {eid: Fraction(1) for eid in cg.vertices}
    return build_vc_instance(cg, tot, solver=CutCoverSolver(bundles))


def path_edge_ids(g: Graph) -> frozenset:
    """Edges lying on at least one s-t path."""
    on_path = set()
    for e in g.edges:
        if reachable(g, g.source, e.tail) and reachable(g, e.head, g.sink):
            on_path.add(e.id)
    return frozenset(on_path)


def _selection_threshold(core: Graph, costs: dict, agent: str):
    """Highest bid at which `agent` stays inside the minimum-cost
    double cut, with everyone else's bids fixed. None when every
    double cut contains the agent (the bid never prices it out)."""
    free = dict(costs)
    free[agent] = ZERO
    contained = min_double_cut(core, free).cost
    blocked = dict(costs)
    blocked[agent] = sum(costs[e.id] for e in core.edges) + 1
    avoiding = min_double_cut(core, blocked)
    if agent in avoiding.double_cut:
        return None
    return avoiding.cost - contained


def cm_run(g: Graph, costs: dict) -> AuctionOutcome:
    """Run the full cut auction: buy a double cut, collapse to bundles,
    then hold the eigenvector cover auction. Winners form an s-t cut;
    edges outside the double cut lose at price 0.

    The auction happens on the subgraph of edges lying on some s-t
    path. Off-path edges can't appear in a minimal cut, and contracting
    them would spuriously merge blocks through edges no path uses."""
    _check_cut_input(g, costs)
    core = g.subgraph_edges(path_edge_ids(g))
    result = min_double_cut(core, costs, canonical=True)
    d = prune_redundant(core, costs, result.double_cut)
    bundles = contract_to_h(core, d)
    inst = _cut_vc_instance(bundles)
    bids = {eid: costs[eid] for eid in d}
    outcome = ev_run(inst, bids)
    payments = {e.id: 0.0 for e in g.edges}
    payments.update(outcome.payments)
    # A winner's threshold is the smaller of two exits: losing the
    # cover auction inside the bundles, or bidding itself out of the
    # selected double cut. Cap each payment by the latter.
    for winner in outcome.winners:
        tau = _selection_threshold(core, costs, winner)
        if tau is not None:
            payments[winner] = min(payments[winner], float(tau))
    diagnostics = dict(outcome.diagnostics)
    diagnostics["double_cut"] = sorted(d)
    diagnostics["double_cut_method"] = result.method
    total = sum(payments[w] for w in outcome.winners)
    return AuctionOutcome(outcome.winners, payments, total, diagnostics)
