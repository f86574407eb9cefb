"""Attributed networks, subgraphs and the subgraph set algebra."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError

Edge = tuple[str, str]


def canonical_edge(u: str, v: str) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class AttributedNetwork:
    """Undirected simple graph whose nodes carry an empirical p-value.

    Node ids are opaque strings; the dense index of a node is its position in
    lexicographic order, so every derived ordering is stable across runs.
    """

    network_id: str
    nodes: frozenset[str]
    edges: frozenset[Edge]
    pvalues: Mapping[str, float] = field(hash=False, compare=True)

    def __post_init__(self):
        nodes = frozenset(str(v) for v in self.nodes)
        edges = set()
        for u, v in self.edges:
            u, v = str(u), str(v)
            if u == v:
                raise InputError(f"self-loop on node {u!r} in network {self.network_id!r}")
            for x in (u, v):
                if x not in nodes:
                    raise InputError(f"edge endpoint {x!r} is not a node of {self.network_id!r}")
            edges.add(canonical_edge(u, v))
        pv = {}
        for v in nodes:
            if v not in self.pvalues:
                raise InputError(f"node {v!r} has no p-value in {self.network_id!r}")
            p = float(self.pvalues[v])
            if not (0.0 < p <= 1.0):
                raise InputError(f"p-value of {v!r} is {p}, outside (0, 1]")
            pv[v] = p
        extra = set(self.pvalues) - nodes
        if extra:
            raise InputError(f"p-value given for unknown node {sorted(extra)[0]!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "pvalues", pv)

    @classmethod
    def build(cls, network_id: str, edges: Iterable[Edge], pvalues: Mapping[str, float],
              nodes: Iterable[str] | None = None) -> "AttributedNetwork":
        """Convenience constructor; nodes default to the p-value keys."""
        node_set = set(pvalues) if nodes is None else set(nodes)
        return cls(network_id, frozenset(node_set), frozenset(tuple(e) for e in edges), dict(pvalues))

    def with_pvalues(self, pvalues: Mapping[str, float]) -> "AttributedNetwork":
        return AttributedNetwork(self.network_id, self.nodes, self.edges, dict(pvalues))

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def order(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.order)}

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.order}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) over dense indices; neighbour lists sorted ascending."""
        idx = self.index
        indptr = np.zeros(len(self.order) + 1, dtype=np.int32)
        indices = []
        for i, v in enumerate(self.order):
            nbrs = sorted(idx[u] for u in self.adjacency[v])
            indices.extend(nbrs)
            indptr[i + 1] = len(indices)
        return indptr, np.asarray(indices, dtype=np.int32)

    @cached_property
    def pvalue_array(self) -> np.ndarray:
        return np.array([self.pvalues[v] for v in self.order], dtype=np.float64)

    def neighbors(self, v: str) -> tuple[str, ...]:
        return self.adjacency[v]

    def whole(self) -> "Subgraph":
        return Subgraph(self.network_id, self.nodes, self.edges)


@dataclass(frozen=True)
class Subgraph:
    network_id: str
    nodes: frozenset[str]
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(canonical_edge(u, v) for u, v in self.edges))

    @classmethod
    def empty(cls, network_id: str) -> "Subgraph":
        return cls(network_id, frozenset(), frozenset())

    def __len__(self) -> int:
        return len(self.nodes)

    def __bool__(self) -> bool:
        return bool(self.nodes)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)


def induced_subgraph(net: AttributedNetwork, node_set: Iterable[str]) -> Subgraph:
    nodes = frozenset(node_set)
    for v in sorted(nodes):
        if v not in net.nodes:
            raise InputError(f"unknown node id {v!r} for network {net.network_id!r}")
    if len(nodes) * 4 < len(net.edges):
        edges = set()
        for v in nodes:
            for u in net.adjacency[v]:
                if u in nodes:
                    edges.add(canonical_edge(u, v))
    else:
        edges = {e for e in net.edges if e[0] in nodes and e[1] in nodes}
    return Subgraph(net.network_id, nodes, frozenset(edges))


def subgraph_set_op(s1: Subgraph, s2: Subgraph, mode: str) -> Subgraph:
    """Combine two subgraphs of one network node-wise and edge-wise.

    The edge set is combined with the same set operation as the node set and
    is not re-induced, so ``difference`` may leave edges whose endpoint was
    removed. Pass the result through :func:`induced_subgraph` to normalize.
    """
    if s1.network_id != s2.network_id:
        raise InputError(f"subgraphs belong to different networks: {s1.network_id!r} vs {s2.network_id!r}")
    if mode == "union":
        return Subgraph(s1.network_id, s1.nodes | s2.nodes, s1.edges | s2.edges)
    if mode == "intersection":
        return Subgraph(s1.network_id, s1.nodes & s2.nodes, s1.edges & s2.edges)
    if mode == "difference":
        return Subgraph(s1.network_id, s1.nodes - s2.nodes, s1.edges - s2.edges)
    raise InputError(f"unknown set operation {mode!r}")


def _components(nodes: frozenset[str], edges: Iterable[Edge]) -> list[frozenset[str]]:
    adj: dict[str, list[str]] = {v: [] for v in nodes}
    for u, v in edges:
        if u in adj and v in adj:
            adj[u].append(v)
            adj[v].append(u)
    seen: set[str] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(frozenset(comp))
    return comps


def is_connected(s: Subgraph) -> bool:
    if len(s.nodes) <= 1:
        return True
    return len(_components(s.nodes, s.edges)) == 1


def connected_components(s: Subgraph) -> list[Subgraph]:
    """Maximal components, ordered by their smallest node id."""
    out = []
    for comp in _components(s.nodes, s.edges):
        edges = frozenset(e for e in s.edges if e[0] in comp and e[1] in comp)
        out.append(Subgraph(s.network_id, comp, edges))
    return out


def is_connected_set(net: AttributedNetwork, node_set: Iterable[str]) -> bool:
    return is_connected(induced_subgraph(net, node_set))


def bfs_path(net: AttributedNetwork, sources: Iterable[str], targets: Iterable[str],
             allowed: set[str] | None = None) -> list[str] | None:
    """Shortest path from any source to any target (inclusive), ties broken by node order."""
    targets = set(targets)
    parent: dict[str, str | None] = {}
    queue = deque()
    for s in sorted(set(sources)):
        parent[s] = None
        queue.append(s)
    while queue:
        x = queue.popleft()
        if x in targets:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for y in net.adjacency[x]:
            if y not in parent and (allowed is None or y in allowed or y in targets):
                parent[y] = x
                queue.append(y)
    return None
