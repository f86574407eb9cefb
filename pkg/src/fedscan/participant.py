"""Data-owner side: private anomaly detection and best public alignment."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .alignment import AlignmentMap, private_counts, public_counts, q_score
from .errors import InputError
from .graph import (AttributedNetwork, Subgraph, bfs_path, connected_components, induced_subgraph,
                    is_connected)
from .stats import ScanConfig, network_scale, scan_score

EXHAUSTIVE_LIMIT = 14
_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    max_restarts: int = 32
    seed_pool_size: int = 8
    rng_seed: int = 0
    exact_threshold: int = 10
    lookahead: int = 2

    def __post_init__(self):
        if self.max_restarts < 1:
            raise InputError("max_restarts must be >= 1")
        if self.exact_threshold > EXHAUSTIVE_LIMIT:
            raise InputError(f"exact_threshold must be <= {EXHAUSTIVE_LIMIT}")


@dataclass
class OwnerState:
    owner_id: str
    network: AttributedNetwork
    alignment: AlignmentMap
    scan_cfg: ScanConfig
    lam: float = 1.0
    current_S: Subgraph | None = None
    current_U_local: Subgraph | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise InputError("lambda must be non-negative")
        if self.current_S is None:
            self.current_S = Subgraph.empty(self.network.network_id)
        if self.current_U_local is None:
            self.current_U_local = Subgraph.empty("public")


def combine(f: float, q: float, lam: float) -> float:
    """Per-owner objective: normalized scan score plus lambda-weighted half alignment score."""
    if lam == 0.0 or q == 0.0:
        return f
    return f + (lam / 2.0) * q


def owner_objective(state: OwnerState, s: Subgraph, u: Subgraph, lam: float | None = None) -> float:
    lam = state.lam if lam is None else lam
    return combine(scan_score(s, state.network, state.scan_cfg), q_score(s, u, state.alignment), lam)


def _norm_args(net: AttributedNetwork, cfg: ScanConfig) -> tuple[int, int, float]:
    stat = 0 if cfg.statistic == "BJ" else 1
    if not cfg.normalize:
        return stat, 0, 1.0
    if cfg.norm_scope == "size":
        return stat, 2, 1.0
    return stat, 1, network_scale(net, cfg)


def _better(obj: float, nodes: list[str], best_obj: float, best_nodes: list[str]) -> bool:
    tol = _TOL * max(1.0, abs(best_obj))
    if obj > best_obj + tol:
        return True
    if obj < best_obj - tol:
        return False
    if len(nodes) != len(best_nodes):
        return len(nodes) < len(best_nodes)
    return sorted(nodes) < sorted(best_nodes)


def exhaustive_connected_argmax(net: AttributedNetwork, objective: Callable[[Subgraph], float],
                                max_nodes: int = EXHAUSTIVE_LIMIT) -> Subgraph:
    """Brute-force maximiser over every connected node subset of ``net`` (plus the empty set).

    Ties go to fewer nodes, then to the lexicographically smaller sorted node list.
    """
    if len(net.nodes) > min(max_nodes, EXHAUSTIVE_LIMIT):
        raise InputError(f"network {net.network_id!r} has {len(net.nodes)} nodes; "
                         f"exhaustive search is limited to {min(max_nodes, EXHAUSTIVE_LIMIT)}")
    best = Subgraph.empty(net.network_id)
    best_obj = objective(best)
    order = net.order
    for size in range(1, len(order) + 1):
        for combo in itertools.combinations(order, size):
            sub = induced_subgraph(net, combo)
            if not is_connected(sub):
                continue
            o = objective(sub)
            if _better(o, list(combo), best_obj, best.sorted_nodes()):
                best, best_obj = sub, o
    return best


def _seeds(state: OwnerState, cnt: list[int], search: SearchConfig) -> np.ndarray:
    net = state.network
    pv = net.pvalue_array
    by_p = sorted(range(len(net.order)), key=lambda i: (pv[i], i))
    picked: list[int] = []
    seen: set[int] = set()
    for i in by_p[: search.seed_pool_size] + [i for i, c in enumerate(cnt) if c > 0]:
        if i not in seen:
            seen.add(i)
            picked.append(i)
    picked = picked[: search.max_restarts]
    if len(picked) < search.max_restarts:
        rest = [i for i in range(len(net.order)) if i not in seen]
        if rest:
            rng = np.random.default_rng(search.rng_seed)
            extra = rng.permutation(len(rest))[: search.max_restarts - len(picked)]
            picked.extend(rest[j] for j in extra)
    return np.asarray(picked, dtype=np.int32)


def detect_private_anomaly(state: OwnerState, public_U: Subgraph, search: SearchConfig,
                           lam: float | None = None) -> Subgraph:
    """Connected S maximising normalized F(S) + lambda * Q(S, U) / 2; never worse than ``state.current_S``."""
    net = state.network
    cfg = state.scan_cfg
    lam = state.lam if lam is None else lam
    cnt = private_counts(net, public_U.nodes, state.alignment)
    sig = np.fromiter((p <= cfg.alpha for p in net.pvalue_array), dtype=np.int32, count=len(net.order))
    stat, norm, scale = _norm_args(net, cfg)
    args = (stat, cfg.alpha, norm, scale, 1.0, lam / 2.0, len(public_U.nodes))
    indptr, indices = net.csr
    cnt_arr = np.asarray(cnt, dtype=np.int32)
    if len(net.order) <= search.exact_threshold:
        idx, obj = kernels.exhaustive_search(indptr, indices, sig, cnt_arr, *args)
    else:
        idx, obj = kernels.greedy_search(indptr, indices, sig, cnt_arr, _seeds(state, cnt, search),
                                         *args, search.lookahead)
    found = [net.order[i] for i in idx]

    if any(cnt) and len(net.order) > search.exact_threshold:
        def value(nodes: set[str]) -> float:
            if not nodes:
                return 0.0
            ii = [net.index[v] for v in nodes]
            return kernels.objective(len(ii), int(sig[ii].sum()), int(cnt_arr[ii].sum()), *args)

        image = {net.order[i] for i, c in enumerate(cnt) if c > 0}
        for o, nodes in _steiner_candidates(net, image, value):
            if _better(o, nodes, obj, found):
                obj, found = o, nodes

    inc = state.current_S
    if inc is not None and inc.nodes and is_connected(inc):
        ii = [net.index[v] for v in inc.nodes]
        inc_obj = kernels.objective(len(ii), int(sig[ii].sum()), int(cnt_arr[ii].sum()), *args)
        if not obj > inc_obj + _TOL * max(1.0, abs(inc_obj)):
            return induced_subgraph(net, inc.nodes)
    return induced_subgraph(net, found)


def _prune(public: AttributedNetwork, nodes: set[str], value: Callable[[set[str]], float]) -> tuple[set[str], float]:
    """Drop leaf nodes (degree <= 1 inside the set) while that strictly raises ``value``."""
    nodes = set(nodes)
    cur = value(nodes)
    while nodes:
        pick, pick_obj = None, cur
        for v in sorted(nodes):
            if sum(1 for u in public.adjacency[v] if u in nodes) > 1:
                continue
            o = value(nodes - {v})
            if o > pick_obj + _TOL * max(1.0, abs(pick_obj)):
                pick, pick_obj = v, o
        if pick is None:
            break
        nodes.discard(pick)
        cur = pick_obj
    return nodes, cur


def best_public_alignment(state: OwnerState, public_net: AttributedNetwork, search: SearchConfig) -> Subgraph:
    """Connected U in the public network maximising Q(current_S, U)."""
    s = state.current_S
    if s is None or not s.nodes:
        return Subgraph.empty(public_net.network_id)
    cnt = public_counts(public_net, s.nodes, state.alignment)
    if not any(cnt):
        return Subgraph.empty(public_net.network_id)
    n_s = len(s.nodes)
    args = (0, 0.5, 0, 1.0, 0.0, 1.0, n_s)
    indptr, indices = public_net.csr
    cnt_arr = np.asarray(cnt, dtype=np.int32)
    sig = np.zeros(len(public_net.order), dtype=np.int32)
    if len(public_net.order) <= search.exact_threshold:
        idx, _ = kernels.exhaustive_search(indptr, indices, sig, cnt_arr, *args)
        return induced_subgraph(public_net, [public_net.order[i] for i in idx])

    by_name = dict(zip(public_net.order, cnt))

    def value(nodes: set[str]) -> float:
        if not nodes:
            return 0.0
        return kernels.objective(len(nodes), 0, sum(by_name[v] for v in nodes), *args)

    image = {v for v, c in by_name.items() if c > 0}
    candidates = _steiner_candidates(public_net, image, value)

    seeds = np.asarray([public_net.index[v] for v in sorted(image)][: max(search.max_restarts, 1)], dtype=np.int32)
    idx, o = kernels.greedy_search(indptr, indices, sig, cnt_arr, seeds, *args, search.lookahead)
    candidates.append((o, [public_net.order[i] for i in idx]))

    best_obj, best_nodes = 0.0, []
    for o, nodes in candidates:
        if _better(o, nodes, best_obj, best_nodes):
            best_obj, best_nodes = o, nodes
    return induced_subgraph(public_net, best_nodes)


def _steiner_candidates(net: AttributedNetwork, image: set[str],
                        value: Callable[[set[str]], float]) -> list[tuple[float, list[str]]]:
    """Connect the components of ``image`` one at a time along shortest paths (fewest
    connector nodes first), pruning every intermediate set; each pruned set is a candidate."""
    comps = [set(c.nodes) for c in connected_components(induced_subgraph(net, image))]
    out: list[tuple[float, list[str]]] = []
    for start in range(len(comps)):
        cur = set(comps[start])
        remaining = [c for j, c in enumerate(comps) if j != start]
        pruned, o = _prune(net, cur, value)
        out.append((o, sorted(pruned)))
        while remaining:
            path = bfs_path(net, cur, set().union(*remaining))
            if path is None:
                break
            j = next(k for k, c in enumerate(remaining) if path[-1] in c)
            cur |= set(path) | remaining.pop(j)
            pruned, o = _prune(net, cur, value)
            out.append((o, sorted(pruned)))
    return out
