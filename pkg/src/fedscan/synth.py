"""Synthetic scenarios with planted correlated anomalies, plus evaluation metrics."""

from __future__ import annotations

import heapq
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import io
from .alignment import AlignmentMap
from .errors import InputError
from .graph import AttributedNetwork, Subgraph, canonical_edge
from .runtime import OwnerInput
from .stats import empirical_pvalues

PUBLIC_ID = "public"


@dataclass(frozen=True)
class ScenarioSpec:
    rng_seed: int = 0
    n_owners: int = 3
    nodes_per_owner: int = 200
    public_nodes: int = 200
    edge_density: float = 0.0105
    tree: bool = False
    planted_public_size: int = 15
    planted_private_size: int = 20
    anomaly_p_low: float = 0.01
    background_p: str = "uniform"
    alignment_true_prob: float = 0.95
    alignment_false_prob: float = 0.05
    noise_fraction: float = 0.0
    decoys_per_node: int = 1
    history_length: int = 0
    attributeless: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "attributeless", tuple(int(i) for i in self.attributeless))
        if self.n_owners < 1:
            raise InputError("n_owners must be >= 1")
        if self.planted_private_size > self.nodes_per_owner:
            raise InputError(f"planted_private_size {self.planted_private_size} exceeds "
                             f"nodes_per_owner {self.nodes_per_owner}")
        if self.planted_public_size > self.public_nodes:
            raise InputError(f"planted_public_size {self.planted_public_size} exceeds "
                             f"public_nodes {self.public_nodes}")
        if min(self.planted_private_size, self.planted_public_size) < 1:
            raise InputError("planted sizes must be >= 1")
        for name in ("anomaly_p_low", "alignment_true_prob", "alignment_false_prob", "noise_fraction",
                     "edge_density"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise InputError(f"{name} must lie in [0, 1], got {val}")
        if not (0.0 < self.anomaly_p_low):
            raise InputError("anomaly_p_low must be > 0")
        if self.background_p != "uniform":
            raise InputError(f"unsupported background_p {self.background_p!r}; only 'uniform'")
        if any(not (0 <= i < self.n_owners) for i in self.attributeless):
            raise InputError("attributeless owner index out of range")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["attributeless"] = list(self.attributeless)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScenarioSpec":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown scenario field(s): {', '.join(sorted(unknown))}")
        return cls(**d)


@dataclass(frozen=True)
class GroundTruth:
    anomalies: dict[str, frozenset[str]]
    public_anomaly: frozenset[str]
    anchors: frozenset[tuple[str, str, str]]


@dataclass
class Scenario:
    spec: ScenarioSpec
    public: AttributedNetwork
    owners: list[OwnerInput]
    truth: GroundTruth
    histories: dict[str, dict[str, list[float]]] = field(default_factory=dict)
    noisy: dict[str, frozenset[str]] = field(default_factory=dict)  # nodes whose p-value was resampled

    @property
    def networks(self) -> dict[str, AttributedNetwork]:
        return {o.network.network_id: o.network for o in self.owners}


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    tpr: float
    fnr: float
    anchor_count: int = 0
    undefined: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["undefined"] = list(self.undefined)
        return d


def _random_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform labelled spanning tree of K_n from a random Pruefer sequence."""
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def random_connected_graph(n: int, density: float, tree: bool, rng: np.random.Generator) -> list[tuple[int, int]]:
    edges = {tuple(sorted(e)) for e in _random_tree(n, rng)}
    if tree or n < 3:
        return sorted(edges)
    target = int(round(density * n * (n - 1) / 2))
    while len(edges) < target:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def plant_connected(n: int, edges: list[tuple[int, int]], size: int, rng: np.random.Generator) -> list[int]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    start = int(rng.integers(0, n))
    chosen = {start}
    frontier = set(adj[start])
    while len(chosen) < size:
        if not frontier:
            raise InputError("graph component too small for the planted anomaly")
        nxt = sorted(frontier)[int(rng.integers(0, len(frontier)))]
        chosen.add(nxt)
        frontier.discard(nxt)
        frontier.update(x for x in adj[nxt] if x not in chosen)
    return sorted(chosen)


def _uniform_open(rng: np.random.Generator, size: int) -> np.ndarray:
    return 1.0 - rng.random(size)  # (0, 1]


def generate_scenario(spec: ScenarioSpec) -> Scenario:
    rng = np.random.default_rng(spec.rng_seed)
    n0 = spec.public_nodes
    pub_names = [f"w{i:04d}" for i in range(n0)]
    pub_edges = random_connected_graph(n0, spec.edge_density, spec.tree, rng)
    pub_planted = plant_connected(n0, pub_edges, spec.planted_public_size, rng)
    public = AttributedNetwork.build(
        PUBLIC_ID, [(pub_names[u], pub_names[v]) for u, v in pub_edges], {w: 1.0 for w in pub_names})
    planted_pub_set = set(pub_planted)
    pub_background = [i for i in range(n0) if i not in planted_pub_set]

    owners: list[OwnerInput] = []
    anomalies: dict[str, frozenset[str]] = {}
    anchors: set[tuple[str, str, str]] = set()
    histories: dict[str, dict[str, list[float]]] = {}
    noisy_nodes: dict[str, frozenset[str]] = {}
    for k in range(spec.n_owners):
        owner = f"owner{k}"
        n = spec.nodes_per_owner
        names = [f"o{k}n{i:04d}" for i in range(n)]
        edges = random_connected_graph(n, spec.edge_density, spec.tree, rng)
        planted = plant_connected(n, edges, spec.planted_private_size, rng)
        planted_set = set(planted)

        pv = _uniform_open(rng, n)
        pv[planted] = spec.anomaly_p_low
        n_noise = int(round(spec.noise_fraction * n))
        noisy = rng.permutation(n)[:n_noise]
        pv[noisy] = _uniform_open(rng, n_noise)
        noisy_nodes[owner] = frozenset(names[i] for i in noisy)

        if spec.history_length > 0:
            T = spec.history_length
            hist = rng.poisson(5.0, size=(n, T)).astype(float)
            for i in planted:
                if i not in set(noisy.tolist()):
                    hist[i, -1] = hist[i, :-1].max() + 10.0
            history = {names[i]: hist[i].tolist() for i in range(n)}
            emp = empirical_pvalues(history, T)
            pv = np.array([emp[names[i]] for i in range(n)])
        else:
            history = None
        if k in spec.attributeless:
            pv = np.ones(n)
            history = None

        net = AttributedNetwork.build(owner, [(names[u], names[v]) for u, v in edges],
                                      {names[i]: float(pv[i]) for i in range(n)})

        # one-to-one true anchors: planted -> planted public, background -> background public
        entries: dict[tuple[str, str], float] = {}
        pub_perm = [pub_planted[j] for j in rng.permutation(len(pub_planted))]
        priv_perm = [planted[j] for j in rng.permutation(len(planted))]
        for i, w in zip(priv_perm, pub_perm):
            entries[(names[i], pub_names[w])] = spec.alignment_true_prob
            anchors.add((owner, names[i], pub_names[w]))
        background = [i for i in range(n) if i not in planted_set]
        bg_perm = [background[j] for j in rng.permutation(len(background))]
        bg_pub = [pub_background[j] for j in rng.permutation(len(pub_background))]
        for i, w in zip(bg_perm, bg_pub):
            entries[(names[i], pub_names[w])] = spec.alignment_true_prob
        for i in range(n):
            for _ in range(spec.decoys_per_node):
                w = pub_names[int(rng.integers(0, n0))]
                entries.setdefault((names[i], w), spec.alignment_false_prob)
        owners.append(OwnerInput(net, AlignmentMap(owner, entries, 0.8)))
        anomalies[owner] = frozenset(names[i] for i in planted)
        if history is not None:
            histories[owner] = history

    truth = GroundTruth(anomalies, frozenset(pub_names[i] for i in pub_planted), frozenset(anchors))
    return Scenario(spec, public, owners, truth, histories, noisy_nodes)


def _nodes(x) -> frozenset[str]:
    if isinstance(x, Subgraph):
        return x.nodes
    if isinstance(x, AttributedNetwork):
        return x.nodes
    return frozenset(x)


def evaluate_metrics(detected: Mapping[str, Subgraph | Iterable[str]], truth: Mapping[str, Iterable[str]],
                     universe: Mapping[str, AttributedNetwork | Iterable[str]]) -> MetricsReport:
    """Micro-averaged confusion-matrix metrics over every node of every owner in ``universe``."""
    tp = fp = fn = tn = 0
    for owner, nodes in universe.items():
        all_nodes = _nodes(nodes)
        det = _nodes(detected.get(owner, ())) & all_nodes
        pos = _nodes(truth.get(owner, ())) & all_nodes
        tp += len(det & pos)
        fp += len(det - pos)
        fn += len(pos - det)
        tn += len(all_nodes - det - pos)
    undefined = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    precision = ratio(tp, tp + fp, "precision")
    recall = ratio(tp, tp + fn, "recall")
    fnr = ratio(fn, tp + fn, "fnr")
    accuracy = ratio(tp + tn, tp + fp + fn + tn, "accuracy")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        if tp + fp + fn == 0:
            undefined.append("f1")
    return MetricsReport(precision, recall, f1, accuracy, recall, fnr, 0, tuple(undefined))


def anchor_count(final_S: Mapping[str, Subgraph | Iterable[str]], final_U: Subgraph | Iterable[str],
                 truth_anchors: Iterable[tuple[str, str, str]]) -> int:
    u_nodes = _nodes(final_U)
    s_nodes = {o: _nodes(s) for o, s in final_S.items()}
    return sum(1 for owner, a, b in truth_anchors if b in u_nodes and a in s_nodes.get(owner, ()))


# --- bundle files -------------------------------------------------------------------------------

def write_truth(truth: GroundTruth, path: str | Path) -> None:
    lines = []
    for owner in sorted(truth.anomalies):
        lines += [f"{owner}\t{v}\n" for v in sorted(truth.anomalies[owner])]
    lines += [f"{PUBLIC_ID}\t{w}\n" for w in sorted(truth.public_anomaly)]
    lines += [f"{o}\t{a}\t{b}\n" for o, a, b in sorted(truth.anchors)]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_truth(path: str | Path) -> GroundTruth:
    anomalies: dict[str, set[str]] = {}
    public: set[str] = set()
    anchors: set[tuple[str, str, str]] = set()
    for lineno, parts in io._rows(Path(path)):
        if len(parts) == 2:
            if parts[0] == PUBLIC_ID:
                public.add(parts[1])
            else:
                anomalies.setdefault(parts[0], set()).add(parts[1])
        elif len(parts) == 3:
            anchors.add((parts[0], parts[1], parts[2]))
        else:
            raise InputError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
    return GroundTruth({o: frozenset(v) for o, v in anomalies.items()}, frozenset(public), frozenset(anchors))


def write_bundle(scenario: Scenario, out_dir: str | Path, config: Mapping | None = None) -> Path:
    """Write edge lists, p-values/histories, alignments, truth and a run manifest; returns the manifest path."""
    out = Path(out_dir)
    (out / PUBLIC_ID).mkdir(parents=True, exist_ok=True)
    io.write_edge_list(scenario.public, out / PUBLIC_ID / "edges.tsv")
    io.write_pvalues(scenario.public.pvalues, out / PUBLIC_ID / "pvalues.tsv")
    owners_manifest = []
    for item in scenario.owners:
        owner = item.network.network_id
        d = out / "owners" / owner
        d.mkdir(parents=True, exist_ok=True)
        io.write_edge_list(item.network, d / "edges.tsv")
        io.write_pvalues(item.network.pvalues, d / "pvalues.tsv")
        io.write_alignment(item.alignment, d / "alignment.tsv")
        entry = {"id": owner, "edges": f"owners/{owner}/edges.tsv", "pvalues": f"owners/{owner}/pvalues.tsv",
                 "alignment": f"owners/{owner}/alignment.tsv"}
        if owner in scenario.histories:
            io.write_history(scenario.histories[owner], d / "history.csv")
            entry["history"] = f"owners/{owner}/history.csv"
        owners_manifest.append(entry)
    write_truth(scenario.truth, out / "truth.tsv")
    (out / "scenario.json").write_text(json.dumps(scenario.spec.to_dict(), sort_keys=True, indent=1) + "\n",
                                       encoding="utf-8")
    manifest = {
        "public": {"id": PUBLIC_ID, "edges": f"{PUBLIC_ID}/edges.tsv", "pvalues": f"{PUBLIC_ID}/pvalues.tsv"},
        "owners": owners_manifest,
        "truth": "truth.tsv",
        "config": dict(config or {}),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path
