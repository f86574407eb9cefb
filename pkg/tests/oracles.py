"""Independent reference implementations used as test oracles.

Written directly from the formula definitions with different primitives
(scipy's xlogy, networkx connectivity, fractions) so that they share no code
with the package.
"""

import itertools
import math
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.special import xlogy

from fedscan.graph import AttributedNetwork


def kl(a, b):
    if a < b:
        return 0.0
    return float(xlogy(a, a) - xlogy(a, b) + xlogy(1 - a, 1 - a) - xlogy(1 - a, 1 - b))


def bj(alpha, na, n):
    return n * kl(na / n, alpha)


def hc(alpha, na, n):
    return (na - n * alpha) / math.sqrt(n * alpha * (1 - alpha))


def pvalue(series, t):
    cur = series[t - 1]
    return float(Fraction(sum(x >= cur for x in series), len(series)))


def q(pairs, s_nodes, u_nodes, sigma):
    """pairs: {(a, b): prob}; counts every qualifying (a, b) with a in S, b in U."""
    s_nodes, u_nodes = set(s_nodes), set(u_nodes)
    if not s_nodes or not u_nodes:
        return 0.0
    n = sum(1 for (a, b), p in pairs.items() if p >= sigma and a in s_nodes and b in u_nodes)
    return n / len(s_nodes) + n / len(u_nodes)


def partition_error_unsimplified(groups, sizes, qs):
    """Per-owner summand |U_i| * ((sum_C - |U_i|) / (|U_i| * sum_C)) * q_i."""
    total = 0.0
    for g in groups:
        sc = sum(sizes[m] for m in g)
        for m in g:
            if len(g) == 1:
                continue
            total += sizes[m] * ((sc - sizes[m]) / (sizes[m] * sc)) * qs[m]
    return total


def to_nx(net: AttributedNetwork) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(net.nodes)
    g.add_edges_from(net.edges)
    return g


def connected_subsets(net: AttributedNetwork):
    """Every connected node subset (as frozensets), plus the empty set, via networkx."""
    g = to_nx(net)
    out = [frozenset()]
    order = sorted(net.nodes)
    for k in range(1, len(order) + 1):
        for combo in itertools.combinations(order, k):
            if nx.is_connected(g.subgraph(combo)):
                out.append(frozenset(combo))
    return out


def norm_bj_network(net: AttributedNetwork, nodes, alpha):
    """BJ divided by the all-significant score at K = #(p <= alpha) (at least 1)."""
    if not nodes:
        return 0.0
    k = max(sum(1 for p in net.pvalues.values() if p <= alpha), 1)
    na = sum(1 for v in nodes if net.pvalues[v] <= alpha)
    return bj(alpha, na, len(nodes)) / (k * math.log(1 / alpha))


def random_network(rng: np.random.Generator, n: int, extra_edges: int, p_sig: float = 0.3,
                   alpha: float = 0.15, prefix: str = "v", network_id: str = "g") -> AttributedNetwork:
    """Connected random graph: random tree plus ``extra_edges`` chords."""
    names = [f"{prefix}{i:02d}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((names[j], names[i]))
    for _ in range(extra_edges):
        a, b = rng.choice(n, size=2, replace=False)
        edges.add((names[min(a, b)], names[max(a, b)]))
    pv = {}
    for v in names:
        if rng.random() < p_sig:
            pv[v] = float(rng.uniform(0.001, alpha))
        else:
            pv[v] = float(rng.uniform(alpha + 0.01, 1.0))
    return AttributedNetwork.build(network_id, edges, pv)
