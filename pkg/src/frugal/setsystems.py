"""The three set-system classes and the buyer-pessimal Nash bound.

A set system is a ground set of agents plus its minimal feasible sets,
materialized explicitly at desk scale:

  * vertex-cover: agents are vertices, feasible sets are vertex covers;
  * k-flow: agents are edges, feasible sets contain k edge-disjoint
    s-t paths;
  * cut: agents are edges, feasible sets contain an s-t cut.

nu(sys, c) is the optimal value of the max-total-bid LP over first-price
equilibrium bids, computed exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

import networkx as nx

from . import caps
from .errors import DomainError, InputError, MonopolyError, ScaleError
from .graph import Graph, enumerate_st_paths
from .lp import LEQ, LinearProgram, solve

VERTEX_COVER = "vertex-cover"
K_FLOW = "k-flow"
CUT = "cut"

ZERO = Fraction(0)

CostVector = dict  # agent id -> Fraction


@dataclass(frozen=True)
class SetSystem:
    kind: str
    graph: Graph
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (VERTEX_COVER, K_FLOW, CUT):
            raise InputError(f"unknown set-system kind {self.kind!r}")
        if self.kind == K_FLOW:
            if self.k is None or self.k < 1:
                raise InputError("k-flow systems need k >= 1")
        if self.kind in (K_FLOW, CUT):
            if self.graph.source is None or self.graph.sink is None:
                raise InputError(f"{self.kind} systems need designated s, t")
            if not self.graph.directed:
                raise InputError(f"{self.kind} systems need a directed graph")

    @cached_property
    def agents(self) -> tuple[str, ...]:
        if self.kind == VERTEX_COVER:
            return tuple(sorted(self.graph.vertices))
        return tuple(sorted(e.id for e in self.graph.edges))

    @cached_property
    def minimal_feasible_sets(self) -> tuple[frozenset, ...]:
        if self.kind == VERTEX_COVER:
            sets = _minimal_vertex_covers(self.graph)
        elif self.kind == K_FLOW:
            sets = _minimal_k_flows(self.graph, self.k)
        else:
            sets = _minimal_cuts(self.graph)
        return tuple(sorted(sets, key=lambda s: tuple(sorted(s))))

    def check_monopoly_free(self):
        sets = self.minimal_feasible_sets
        if not sets:
            raise DomainError("no feasible set exists")
        common = frozenset.intersection(*sets)
        if common:
            raise MonopolyError(f"agents {sorted(common)} are in every feasible set")


def _minimal_vertex_covers(g: Graph) -> list[frozenset]:
    if len(g.vertices) > caps.cap(caps.COVER_AGENT_CAP):
        raise ScaleError(f"vertex-cover enumeration capped at "
                         f"{caps.cap(caps.COVER_AGENT_CAP)} agents")
    vertices = set(g.vertices)
    # Minimal covers are complements of maximal independent sets, which
    # are the maximal cliques of the complement graph.
    return [frozenset(vertices - mis) for mis in _maximal_independent_sets(g)]


def _maximal_independent_sets(g: Graph) -> list[frozenset]:
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices)
    for e in g.edges:
        if e.tail != e.head:
            nxg.add_edge(e.tail, e.head)
    comp = nx.complement(nxg)
    limit = caps.cap(caps.INDEPENDENT_SET_CAP)
    out = []
    for clique in nx.find_cliques(comp):
        out.append(frozenset(clique))
        if len(out) > limit:
            raise ScaleError(f"more than {limit} maximal independent sets")
    return sorted(out, key=lambda s: tuple(sorted(s)))


def _minimal_k_flows(g: Graph, k: int) -> list[frozenset]:
    if len(g.edges) > caps.cap(caps.FLOW_EDGE_CAP):
        raise ScaleError(f"k-flow enumeration capped at "
                         f"{caps.cap(caps.FLOW_EDGE_CAP)} edges")
    paths = [frozenset(p) for p in enumerate_st_paths(g)]
    unions: set[frozenset] = set()

    def extend(start: int, chosen: list[frozenset], used: frozenset):
        if len(chosen) == k:
            unions.add(used)
            return
        for i in range(start, len(paths)):
            if used & paths[i]:
                continue
            extend(i + 1, chosen + [paths[i]], used | paths[i])

    extend(0, [], frozenset())
    return _minimal_only(unions)


def _minimal_cuts(g: Graph) -> list[frozenset]:
    inner = sorted(v for v in g.vertices if v not in (g.source, g.sink))
    if len(inner) > caps.cap(caps.COVER_AGENT_CAP):
        raise ScaleError("cut enumeration capped")
    crossings: set[frozenset] = set()
    for r in range(len(inner) + 1):
        for combo in itertools.combinations(inner, r):
            side = {g.source, *combo}
            cross = frozenset(e.id for e in g.edges
                              if e.tail in side and e.head not in side)
            crossings.add(cross)
    return _minimal_only(crossings)


def _minimal_only(sets) -> list[frozenset]:
    out = []
    for s in sorted(sets, key=len):
        if not any(t < s for t in out):
            out.append(s)
    return out


def check_costs(sys: SetSystem, c: CostVector):
    if set(c) != set(sys.agents):
        raise InputError("cost vector must cover exactly the agent set")
    for a, v in c.items():
        if v < 0:
            raise InputError(f"negative cost for agent {a!r}")


@dataclass(frozen=True)
class NuResult:
    value: Fraction
    bids: dict
    winning_set: frozenset


def cheapest_feasible_set(sys: SetSystem, c: CostVector) -> frozenset:
    """The c-cheapest minimal feasible set, ties broken lexicographically
    on the sorted agent-id list."""
    sets = sys.minimal_feasible_sets
    return min(sets, key=lambda s: (sum(c[a] for a in s), tuple(sorted(s))))


def nu(sys: SetSystem, c: CostVector) -> NuResult:
    """Buyer-pessimal Nash bound: the most expensive first-price
    equilibrium supported on the cheapest feasible set.

    Maximizes the winning set's total bid subject to b >= c, b = c off
    the winning set, and no feasible set undercutting the winner. Only
    minimal feasible sets generate constraints (bids are nonnegative,
    so superset constraints are dominated).
    """
    check_costs(sys, c)
    sys.check_monopoly_free()
    winners = sorted(cheapest_feasible_set(sys, c))
    index = {a: i for i, a in enumerate(winners)}
    rows = []
    for t in sys.minimal_feasible_sets:
        only_s = [a for a in winners if a not in t]
        if not only_s:
            continue  # T >= S holds trivially when S \ T is empty
        coeffs = [ZERO] * len(winners)
        for a in only_s:
            coeffs[index[a]] = Fraction(1)
        rhs = sum((c[a] for a in t if a not in index), ZERO)
        rows.append((coeffs, LEQ, rhs))
    lp = LinearProgram.build(
        objective=[1] * len(winners),
        rows=rows,
        lower_bounds=[c[a] for a in winners],
    )
    sol = solve(lp)
    if sol.status != "optimal":
        raise DomainError(f"nu LP is {sol.status}; instance is degenerate")
    bids = dict(c)
    for a, v in zip(winners, sol.assignment):
        bids[a] = v
    return NuResult(sol.value, bids, frozenset(winners))


def unit_costs(sys: SetSystem, agent: str) -> CostVector:
    return {a: (Fraction(1) if a == agent else ZERO) for a in sys.agents}


def tot(sys: SetSystem, agent: str) -> Fraction:
    """nu at the unit cost vector of `agent`."""
    if agent not in sys.agents:
        raise InputError(f"unknown agent {agent!r}")
    return nu(sys, unit_costs(sys, agent)).value


def fractional_clique_number(g: Graph) -> Fraction:
    """LP over maximal independent sets: max sum(y), sum_{u in I} y_u <= 1.

    Maximal independent sets suffice because weights are nonnegative.
    The edgeless graph has value 1 (n >= 1); the empty graph value 0.
    """
    if g.directed:
        raise InputError("fractional clique number needs an undirected graph")
    verts = sorted(g.vertices)
    if not verts:
        return ZERO
    index = {v: i for i, v in enumerate(verts)}
    rows = []
    for mis in _maximal_independent_sets(g):
        coeffs = [ZERO] * len(verts)
        for v in mis:
            coeffs[index[v]] = Fraction(1)
        rows.append((coeffs, LEQ, Fraction(1)))
    sol = solve(LinearProgram.build([1] * len(verts), rows))
    if sol.status != "optimal":
        raise DomainError(f"fractional clique LP is {sol.status}")
    return sol.value


def neighborhood_subgraph(g: Graph, v: str) -> Graph:
    """Subgraph induced by the neighbors of v, without v itself."""
    nbrs = set(g.neighbors(v))
    edges = tuple(e for e in g.edges
                  if e.tail in nbrs and e.head in nbrs and e.tail != e.head)
    return Graph(tuple(sorted(nbrs)), edges, directed=False)
