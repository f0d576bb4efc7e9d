"""The eigenvector-scaled Vertex Cover auction.

Each agent's bid is divided by its entry in the dominant eigenvector of
K = D A, where A is the conflict-graph adjacency matrix and
D = diag(1/Tot(v)). Selection is a min-cost vertex cover under the
scaled bids; winners are paid threshold bids.

Eigenpairs are computed per connected component in floating point
(power iteration on the symmetrized D^{1/2} A D^{1/2}); the exact Nash
quantities stay rational elsewhere, so payments here are floats.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol

import numpy as np

from . import caps
from .errors import DomainError, InputError, ScaleError
from .graph import Graph

EIGEN_RESIDUAL_TOL = 1e-12
RAYLEIGH_TOL = 1e-14
MAX_POWER_ITERATIONS = 200_000


class CoverSolver(Protocol):
    """Three queries every EV instance needs from its cover solver."""

    def min_cover(self, costs: dict) -> tuple[frozenset, float]: ...

    def min_cover_containing(self, agent: str, costs: dict) -> tuple[frozenset, float]:
        """Min cover containing `agent`, with `agent` priced at 0."""

    def min_cover_excluding(self, agent: str, costs: dict) -> tuple[frozenset, float]: ...


@dataclass(frozen=True)
class ComponentEigenpair:
    agents: tuple[str, ...]
    eigenvalue: float
    vector: dict  # agent -> positive float, max entry 1


@dataclass(frozen=True)
class VcInstance:
    conflict_graph: Graph  # isolated agents already stripped
    tot: dict  # agent -> Fraction, >= 1
    components: tuple[ComponentEigenpair, ...]
    solver: CoverSolver
    isolated: tuple[str, ...] = ()

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(sorted(self.conflict_graph.vertices))

    @property
    def q(self) -> dict:
        out = {}
        for comp in self.components:
            out.update(comp.vector)
        return out

    @property
    def max_eigenvalue(self) -> float:
        return max(c.eigenvalue for c in self.components)


@dataclass(frozen=True)
class AuctionOutcome:
    winners: frozenset
    payments: dict  # agent -> float; losers carry 0.0
    total_payment: float
    diagnostics: dict = field(default_factory=dict)


def _connected_components(g: Graph) -> list[list[str]]:
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        if e.tail != e.head:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    seen: set[str] = set()
    comps = []
    for v in sorted(g.vertices):
        if v in seen:
            continue
        comp = []
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def _component_eigenpair(agents: list[str], adj: set[tuple[str, str]],
                         tot: dict) -> ComponentEigenpair:
    n = len(agents)
    index = {a: i for i, a in enumerate(agents)}
    a_mat = np.zeros((n, n))
    for u, v in adj:
        a_mat[index[u], index[v]] = 1.0
        a_mat[index[v], index[u]] = 1.0
    d_half = np.array([1.0 / float(tot[a]) for a in agents]) ** 0.5
    k_sym = d_half[:, None] * a_mat * d_half[None, :]
    # Power iteration on K' + I: the shift makes the Perron root strictly
    # dominant even on bipartite components.
    shifted = k_sym + np.eye(n)
    vec = np.ones(n)
    vec /= np.linalg.norm(vec)
    rayleigh = float(vec @ shifted @ vec)
    lam = rayleigh - 1.0
    for _ in range(MAX_POWER_ITERATIONS):
        nxt = shifted @ vec
        nxt /= np.linalg.norm(nxt)
        new_rayleigh = float(nxt @ shifted @ nxt)
        vec = nxt
        converged = abs(new_rayleigh - rayleigh) < RAYLEIGH_TOL
        rayleigh = new_rayleigh
        if converged:
            lam = rayleigh - 1.0
            k_full = a_mat * (d_half**2)[:, None]  # K = D A
            q = d_half * vec
            resid = np.max(np.abs(k_full @ q - lam * q))
            if resid <= EIGEN_RESIDUAL_TOL * np.max(np.abs(q)):
                break
    else:
        raise DomainError("power iteration failed to reach eigen tolerance")
    q = d_half * vec
    q = q / q.max()
    return ComponentEigenpair(tuple(agents), lam,
                              {a: float(q[index[a]]) for a in agents})


class BruteForceCoverSolver:
    """Exhaustive min-cost vertex cover over agent subsets.

    Ties broken lexicographically on the sorted agent-id tuple. Capped
    at 2^20 candidate subsets.
    """

    def __init__(self, conflict_graph: Graph):
        self.agents = tuple(sorted(conflict_graph.vertices))
        self.edges = tuple(sorted({tuple(sorted((e.tail, e.head)))
                                   for e in conflict_graph.edges
                                   if e.tail != e.head}))
        if 2 ** len(self.agents) > caps.cap(caps.SUBSET_CAP):
            raise ScaleError("brute-force cover solver capped at 2^20 subsets")

    def _best(self, costs, required=None, forbidden=None):
        pool = [a for a in self.agents if a != forbidden]
        best = None
        for r in range(len(pool) + 1):
            for combo in itertools.combinations(pool, r):
                sel = set(combo)
                if required is not None and required not in sel:
                    continue
                if any(u not in sel and v not in sel for u, v in self.edges):
                    continue
                cost = sum(costs[a] for a in sel if a != required)
                key = (cost, combo)
                if best is None or key < best:
                    best = key
        if best is None:
            raise DomainError("no vertex cover exists under the constraints")
        return frozenset(best[1]), best[0]

    def min_cover(self, costs):
        return self._best(costs)

    def min_cover_containing(self, agent, costs):
        return self._best(costs, required=agent)

    def min_cover_excluding(self, agent, costs):
        return self._best(costs, forbidden=agent)


class MinimalCoverSolver:
    """Cover queries answered from the precomputed minimal covers.

    Every cover contains a minimal one and extra vertices only add
    cost, so all three query values are minima over the minimal-cover
    list: containment prices the pinned agent at zero (append it if
    absent), exclusion restricts to covers that omit the agent (one
    always exists, since every vertex is in some maximal independent
    set). Far faster than subset enumeration when the same instance
    sees many bid vectors."""

    def __init__(self, conflict_graph: Graph):
        from .setsystems import _minimal_vertex_covers
        self.covers = sorted(_minimal_vertex_covers(conflict_graph),
                             key=lambda s: tuple(sorted(s)))

    @staticmethod
    def _value(cover, costs, skip=None):
        return sum(costs[a] for a in cover if a != skip)

    def min_cover(self, costs):
        best = min(self.covers,
                   key=lambda c: (self._value(c, costs), tuple(sorted(c))))
        return best, self._value(best, costs)

    def min_cover_containing(self, agent, costs):
        best = min(self.covers,
                   key=lambda c: (self._value(c, costs, skip=agent),
                                  tuple(sorted(c))))
        return best | {agent}, self._value(best, costs, skip=agent)

    def min_cover_excluding(self, agent, costs):
        pool = [c for c in self.covers if agent not in c]
        if not pool:
            raise DomainError(f"agent {agent!r} is in every cover")
        best = min(pool, key=lambda c: (self._value(c, costs),
                                        tuple(sorted(c))))
        return best, self._value(best, costs)


def build_vc_instance(conflict_graph: Graph, tot: dict,
                      solver: CoverSolver | None = None) -> VcInstance:
    """Strip isolated agents, then compute per-component eigenpairs."""
    if conflict_graph.directed:
        raise InputError("conflict graph must be undirected")
    if any(e.tail == e.head for e in conflict_graph.edges):
        raise InputError("conflict graph must have no self-loops")
    for v in conflict_graph.vertices:
        if v not in tot:
            raise InputError(f"missing Tot value for agent {v!r}")
        if tot[v] < 1:
            raise InputError(f"Tot({v!r}) must be >= 1")

    isolated = tuple(sorted(v for v in conflict_graph.vertices
                            if not conflict_graph.neighbors(v)))
    live = tuple(sorted(set(conflict_graph.vertices) - set(isolated)))
    stripped = Graph(live, conflict_graph.edges, directed=False)

    adj = {tuple(sorted((e.tail, e.head))) for e in stripped.edges}
    comps = []
    for agents in _connected_components(stripped):
        agent_set = set(agents)
        local_adj = {pair for pair in adj if pair[0] in agent_set}
        comps.append(_component_eigenpair(agents, local_adj, tot))
    if solver is None:
        solver = BruteForceCoverSolver(stripped)
    return VcInstance(stripped, dict(tot), tuple(comps), solver, isolated)


def scaled_costs(inst: VcInstance, bids: dict) -> dict:
    q = inst.q
    out = {}
    for a in inst.agents:
        if a not in bids:
            raise InputError(f"missing bid for agent {a!r}")
        if bids[a] < 0:
            raise InputError(f"negative bid for agent {a!r}")
        out[a] = float(bids[a]) / q[a]
    return out


def ev_run(inst: VcInstance, bids: dict) -> AuctionOutcome:
    """Run the eigenvector mechanism on one bid vector.

    Winner u is paid q_u * (B_u - A_u): A_u is the min scaled cover cost
    with u included and priced 0, B_u the min scaled cover cost without
    u; their gap is u's threshold in scaled units.
    """
    m = scaled_costs(inst, bids)
    q = inst.q
    winners, _ = inst.solver.min_cover(m)
    payments = {a: 0.0 for a in inst.agents}
    for u in sorted(winners):
        _, a_val = inst.solver.min_cover_containing(u, m)
        _, b_val = inst.solver.min_cover_excluding(u, m)
        payments[u] = q[u] * (b_val - a_val)
    # Isolated agents win trivially at price 0.
    for a in inst.isolated:
        payments[a] = 0.0
    all_winners = frozenset(winners) | frozenset(inst.isolated)
    total = float(sum(payments.values()))
    diagnostics = {
        "scaled_bids": m,
        "lambda": [c.eigenvalue for c in inst.components],
    }
    return AuctionOutcome(all_winners, payments, total, diagnostics)


def unit_bid_vector(inst: VcInstance, agent: str,
                    value: Fraction = Fraction(1)) -> dict:
    bids = {a: Fraction(0) for a in inst.agents}
    bids.update({a: Fraction(0) for a in inst.isolated})
    bids[agent] = value
    return bids


def ev_frugality_on_units(inst: VcInstance) -> float:
    """Worst total-payment / Tot ratio over unit cost vectors.

    These are the extremal cost vectors for the eigenvalue upper bound,
    so this equals the largest component eigenvalue.
    """
    worst = 0.0
    for v in inst.agents:
        outcome = ev_run(inst, unit_bid_vector(inst, v))
        worst = max(worst, outcome.total_payment / float(inst.tot[v]))
    return worst


Mechanism = Callable[[dict], AuctionOutcome]


def probe_lower_bound(inst: VcInstance,
                      mechanism: Mechanism) -> tuple[str, float]:
    """Pairwise-competition probe for the eigenvalue/2 payment bound.

    Orients each conflict edge toward whichever endpoint wins when the
    two endpoints bid their eigenvector weights, picks a node whose
    out-weight is at least its in-weight, and measures the mechanism's
    payment ratio on that node's weighted unit cost vector.
    """
    q = inst.q
    out_nbrs: dict[str, set[str]] = {v: set() for v in inst.agents}
    in_nbrs: dict[str, set[str]] = {v: set() for v in inst.agents}
    edges = sorted({tuple(sorted((e.tail, e.head)))
                    for e in inst.conflict_graph.edges})
    for u, v in edges:
        bids = {a: Fraction(0) for a in inst.agents}
        bids[u] = Fraction(q[u])
        bids[v] = Fraction(q[v])
        outcome = mechanism(bids)
        if u in outcome.winners:
            out_nbrs[v].add(u)
            in_nbrs[u].add(v)
        if v in outcome.winners:
            out_nbrs[u].add(v)
            in_nbrs[v].add(u)
        if u not in outcome.winners and v not in outcome.winners:
            raise DomainError("mechanism returned a non-cover winning set")

    pivot = None
    for v in inst.agents:
        if sum(q[u] for u in out_nbrs[v]) >= sum(q[u] for u in in_nbrs[v]):
            pivot = v
            break
    if pivot is None:
        raise DomainError("no balanced node found; orientation is inconsistent")

    outcome = mechanism(unit_bid_vector(inst, pivot, Fraction(q[pivot])))
    lower_bound_nu = float(inst.tot[pivot]) * q[pivot]
    return pivot, outcome.total_payment / lower_bound_nu
