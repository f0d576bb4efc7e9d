"""Exact multigraph representation and the path/reachability primitives
used by every mechanism.

Graphs are immutable after construction. Parallel edges are permitted
(and required: contraction produces parallel edge groups), and each
edge carries a stable unique id.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional

from .caps import PATH_CAP, cap
from .errors import InputError, ScaleError
from .rational import format_rational, parse_rational


class Edge(NamedTuple):
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Graph:
    """Directed or undirected multigraph with optional designated s, t."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    directed: bool = True
    source: Optional[str] = None
    sink: Optional[str] = None

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise InputError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail not in vset or e.head not in vset:
                raise InputError(f"edge {e.id!r} references unknown vertex")
        for endpoint in (self.source, self.sink):
            if endpoint is not None and endpoint not in vset:
                raise InputError(f"designated vertex {endpoint!r} not in graph")
        if self.source is not None and self.source == self.sink:
            raise InputError("source and sink must differ")

    @staticmethod
    def build(vertices: Iterable[str], edges: Iterable[tuple[str, str, str]],
              directed: bool = True, source: str | None = None,
              sink: str | None = None) -> "Graph":
        return Graph(tuple(vertices), tuple(Edge(*e) for e in edges),
                     directed, source, sink)

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _out(self) -> dict[str, tuple[Edge, ...]]:
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.tail].append(e)
            if not self.directed:
                adj[e.head].append(Edge(e.id, e.head, e.tail))
        return {v: tuple(sorted(es, key=lambda e: e.id)) for v, es in adj.items()}

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    def neighbors(self, v: str) -> list[str]:
        """Distinct adjacent vertices (undirected sense), sorted."""
        nbrs = set()
        for e in self.edges:
            if e.tail == v and e.head != v:
                nbrs.add(e.head)
            if e.head == v and e.tail != v:
                nbrs.add(e.tail)
        return sorted(nbrs)

    def subgraph_edges(self, edge_ids: Iterable[str]) -> "Graph":
        """Subgraph on the given edges, keeping all incident vertices."""
        ids = set(edge_ids)
        unknown = ids - set(self.edge_by_id)
        if unknown:
            raise InputError(f"unknown edge ids: {sorted(unknown)}")
        kept = tuple(e for e in self.edges if e.id in ids)
        verts = {v for e in kept for v in (e.tail, e.head)}
        for endpoint in (self.source, self.sink):
            if endpoint is not None:
                verts.add(endpoint)
        return Graph(tuple(sorted(verts)), kept, self.directed,
                     self.source, self.sink)


VertexMap = dict  # original vertex id -> super-vertex id


def contract_edges(g: Graph, keep: set[str]) -> tuple[Graph, VertexMap]:
    """Contract every edge NOT in `keep`, merging its endpoints.

    Kept edges retain their ids; self-loops among kept edges are
    retained so callers can detect structural violations explicitly.
    Super-vertices are named by their smallest original member id.
    """
    unknown = set(keep) - set(g.edge_by_id)
    if unknown:
        raise InputError(f"unknown edge ids: {sorted(unknown)}")

    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        if e.id not in keep:
            ra, rb = find(e.tail), find(e.head)
            if ra != rb:
                parent[rb] = ra

    blocks: dict[str, list[str]] = {}
    for v in g.vertices:
        blocks.setdefault(find(v), []).append(v)
    name = {root: min(members) for root, members in blocks.items()}
    vmap = {v: name[find(v)] for v in g.vertices}

    new_edges = tuple(Edge(e.id, vmap[e.tail], vmap[e.head])
                      for e in g.edges if e.id in keep)
    new_vertices = tuple(sorted(set(vmap.values())))
    src = vmap[g.source] if g.source is not None else None
    snk = vmap[g.sink] if g.sink is not None else None
    if src is not None and src == snk:
        raise InputError("contraction merged source and sink")
    contracted = Graph(new_vertices, new_edges, g.directed, src, snk)
    return contracted, vmap


def enumerate_st_paths(g: Graph, path_cap: int | None = None) -> list[list[str]]:
    """All simple directed s-t paths as ordered edge-id lists.

    Deterministic: paths come out in lexicographic order of their
    edge-id sequences. Raises ScaleError beyond the configured cap.
    """
    if g.source is None or g.sink is None:
        raise InputError("graph has no designated source/sink")
    limit = cap(PATH_CAP) if path_cap is None else path_cap
    paths: list[list[str]] = []
    trail: list[str] = []
    visited = {g.source}

    def dfs(v: str):
        if v == g.sink:
            if len(paths) >= limit:
                raise ScaleError(f"more than {limit} s-t paths")
            paths.append(list(trail))
            return
        for e in g.out_edges(v):
            if e.head in visited:
                continue
            visited.add(e.head)
            trail.append(e.id)
            dfs(e.head)
            trail.pop()
            visited.remove(e.head)

    dfs(g.source)
    return paths


def reachable(g: Graph, a: str, b: str) -> bool:
    """True iff a directed path from a to b exists (a reaches itself)."""
    if a not in g._out or b not in g._out:
        raise InputError(f"unknown vertex in reachability query")
    if a == b:
        return True
    seen = {a}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for e in g.out_edges(v):
            if e.head not in seen:
                if e.head == b:
                    return True
                seen.add(e.head)
                queue.append(e.head)
    return False


def graph_from_json(data: dict) -> tuple[Graph, Optional[dict]]:
    """Parse the documented graph JSON format.

    Returns (graph, costs) where costs maps edge id -> Fraction when any
    edge carries a "cost" field, else None.
    """
    if not isinstance(data, dict):
        raise InputError("graph JSON must be an object")
    try:
        directed = bool(data.get("directed", True))
        vertices = [str(v) for v in data["vertices"]]
        raw_edges = data["edges"]
    except KeyError as exc:
        raise InputError(f"graph JSON missing key {exc}") from exc
    edges = []
    costs = {}
    for item in raw_edges:
        try:
            edges.append((str(item["id"]), str(item["tail"]), str(item["head"])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad edge entry {item!r}") from exc
        if "cost" in item:
            costs[str(item["id"])] = parse_rational(item["cost"])
    g = Graph.build(vertices, edges, directed,
                    data.get("source"), data.get("sink"))
    return g, (costs or None)


def graph_to_json(g: Graph, costs: Optional[dict] = None) -> dict:
    data = {
        "directed": g.directed,
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head,
             **({"cost": format_rational(costs[e.id])} if costs else {})}
            for e in g.edges
        ],
    }
    if g.source is not None:
        data["source"] = g.source
    if g.sink is not None:
        data["sink"] = g.sink
    return data


def load_graph(path: str) -> tuple[Graph, Optional[dict]]:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
