"""Tab/CSV file formats for networks, p-values, alignments and observation histories."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Iterable, Mapping

from .alignment import AlignmentMap
from .errors import InputError
from .graph import AttributedNetwork, Edge, canonical_edge

log = logging.getLogger(__name__)


def _rows(path: Path) -> Iterable[tuple[int, list[str]]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split("\t")


def read_edge_list(path: str | Path) -> tuple[set[str], set[Edge]]:
    nodes: set[str] = set()
    seen: set[tuple[str, str]] = set()
    directed = False
    for lineno, parts in _rows(path):
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'u<TAB>v', got {len(parts)} fields")
        u, v = parts[0].strip(), parts[1].strip()
        if u == v:
            raise InputError(f"{path}:{lineno}: self-loop on {u!r}")
        if (v, u) in seen:
            directed = True
        seen.add((u, v))
        nodes.update((u, v))
    if directed:
        log.warning("%s: reciprocal directed edges found; graph symmetrized", path)
    return nodes, {canonical_edge(u, v) for u, v in seen}


def read_pvalues(path: str | Path) -> dict[str, float]:
    out: dict[str, float] = {}
    for lineno, parts in _rows(path):
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'node<TAB>pvalue'")
        try:
            p = float(parts[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: p-value {parts[1]!r} is not a number") from None
        if not (0.0 < p <= 1.0):
            raise InputError(f"{path}:{lineno}: p-value {p} outside (0, 1]")
        if parts[0] in out:
            raise InputError(f"{path}:{lineno}: duplicate node {parts[0]!r}")
        out[parts[0].strip()] = p
    return out


def read_alignment(path: str | Path, owner_id: str, sigma: float) -> AlignmentMap:
    entries: dict[tuple[str, str], float] = {}
    for lineno, parts in _rows(path):
        if len(parts) != 3:
            raise InputError(f"{path}:{lineno}: expected 'private<TAB>public<TAB>probability'")
        try:
            prob = float(parts[2])
        except ValueError:
            raise InputError(f"{path}:{lineno}: probability {parts[2]!r} is not a number") from None
        if not (0.0 <= prob <= 1.0):
            raise InputError(f"{path}:{lineno}: probability {prob} outside [0, 1]")
        entries[(parts[0].strip(), parts[1].strip())] = prob
    return AlignmentMap(owner_id, entries, sigma)


def read_history(path: str | Path) -> dict[str, list[float]]:
    """CSV with header ``node,t1,...,tT`` and one row per node."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: file not found")
    out: dict[str, list[float]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "node" or len(header) < 2:
            raise InputError(f"{path}:1: header must be 'node,t1,...,tT'")
        width = len(header)
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != width:
                raise InputError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            try:
                out[row[0]] = [float(x) for x in row[1:]]
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric observation") from None
    return out


def load_network(network_id: str, edges_path: str | Path, pvalues_path: str | Path | None = None,
                 pvalues: Mapping[str, float] | None = None) -> AttributedNetwork:
    """Nodes are the union of edge endpoints and p-value keys; missing p-values default to 1."""
    nodes, edges = read_edge_list(edges_path)
    pv = dict(pvalues or {})
    if pvalues_path is not None:
        pv.update(read_pvalues(pvalues_path))
    nodes |= set(pv)
    full = {v: pv.get(v, 1.0) for v in nodes}
    return AttributedNetwork.build(network_id, edges, full, nodes)


def write_edge_list(net: AttributedNetwork, path: str | Path) -> None:
    lines = [f"{u}\t{v}\n" for u, v in sorted(net.edges)]
    Path(path).write_text("".join(lines), encoding="utf-8")


def format_pvalue(p: float) -> str:
    return repr(float(p))


def write_pvalues(pvalues: Mapping[str, float], path: str | Path) -> None:
    lines = [f"{v}\t{format_pvalue(pvalues[v])}\n" for v in sorted(pvalues)]
    Path(path).write_text("".join(lines), encoding="utf-8")


def write_alignment(amap: AlignmentMap, path: str | Path) -> None:
    lines = [f"{u}\t{w}\t{repr(p)}\n" for (u, w), p in sorted(amap.entries.items())]
    Path(path).write_text("".join(lines), encoding="utf-8")


def write_history(history: Mapping[str, list[float]], path: str | Path) -> None:
    T = len(next(iter(history.values()))) if history else 0
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node"] + [f"t{i}" for i in range(1, T + 1)])
        for v in sorted(history):
            w.writerow([v] + [repr(float(x)) if x != int(x) else str(int(x)) for x in history[v]])
