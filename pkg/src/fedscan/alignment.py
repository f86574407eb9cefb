"""Alignment probabilities between a private network and the public network."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InputError
from .graph import AttributedNetwork, Subgraph


@dataclass(frozen=True)
class AlignmentMap:
    owner_id: str
    entries: Mapping[tuple[str, str], float] = field(hash=False)
    sigma: float = 0.8

    def __post_init__(self):
        if not (0.0 < self.sigma <= 1.0):
            raise InputError(f"sigma must lie in (0, 1], got {self.sigma}")
        clean = {}
        for (u, w), prob in self.entries.items():
            prob = float(prob)
            if not (0.0 <= prob <= 1.0):
                raise InputError(f"alignment probability {prob} for ({u!r}, {w!r}) outside [0, 1]")
            clean[(str(u), str(w))] = prob
        object.__setattr__(self, "entries", clean)

    def check_nodes(self, private: AttributedNetwork, public: AttributedNetwork) -> None:
        for u, w in self.entries:
            if u not in private.nodes:
                raise InputError(f"alignment of {self.owner_id!r} references unknown private node {u!r}")
            if w not in public.nodes:
                raise InputError(f"alignment of {self.owner_id!r} references unknown public node {w!r}")

    def with_sigma(self, sigma: float) -> "AlignmentMap":
        return AlignmentMap(self.owner_id, self.entries, sigma)

    @cached_property
    def qualifying(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(k for k, p in self.entries.items() if p >= self.sigma))

    @cached_property
    def forward(self) -> dict[str, frozenset[str]]:
        """private node -> qualifying public nodes"""
        out = defaultdict(set)
        for u, w in self.qualifying:
            out[u].add(w)
        return {u: frozenset(ws) for u, ws in out.items()}

    @cached_property
    def backward(self) -> dict[str, frozenset[str]]:
        """public node -> qualifying private nodes"""
        out = defaultdict(set)
        for u, w in self.qualifying:
            out[w].add(u)
        return {w: frozenset(us) for w, us in out.items()}

    def transpose(self) -> "AlignmentMap":
        return AlignmentMap(self.owner_id, {(w, u): p for (u, w), p in self.entries.items()}, self.sigma)


def threshold_matrix(amap: AlignmentMap) -> list[tuple[str, str]]:
    """Pairs whose probability reaches sigma (inclusive), in sorted order."""
    return list(amap.qualifying)


def pair_count(private_nodes: Iterable[str], public_nodes: Iterable[str], amap: AlignmentMap) -> int:
    public_nodes = frozenset(public_nodes)
    fwd = amap.forward
    return sum(len(fwd[u] & public_nodes) for u in private_nodes if u in fwd)


def q_from_counts(n_sigma: int, n_s: int, n_u: int) -> float:
    if n_s == 0 or n_u == 0:
        return 0.0
    return n_sigma / n_s + n_sigma / n_u


def q_score(s: Subgraph, u: Subgraph, amap: AlignmentMap) -> float:
    if not s.nodes or not u.nodes:
        return 0.0
    return q_from_counts(pair_count(s.nodes, u.nodes, amap), len(s.nodes), len(u.nodes))


def private_counts(net: AttributedNetwork, public_nodes: Iterable[str], amap: AlignmentMap) -> list[int]:
    """For each private node (dense order), the number of qualifying pairs into ``public_nodes``."""
    public_nodes = frozenset(public_nodes)
    fwd = amap.forward
    return [len(fwd.get(v, frozenset()) & public_nodes) for v in net.order]


def public_counts(public: AttributedNetwork, private_nodes: Iterable[str], amap: AlignmentMap) -> list[int]:
    """For each public node (dense order), the number of qualifying pairs from ``private_nodes``."""
    private_nodes = frozenset(private_nodes)
    bwd = amap.backward
    return [len(bwd.get(w, frozenset()) & private_nodes) for w in public.order]
