"""Server side: order reports, form coalitions, score partitions, pick the public anomaly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .graph import AttributedNetwork, Subgraph, connected_components, induced_subgraph

DEFAULT_THETA = 0.75
BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class ParticipantReport:
    """The only message an owner sends: its local public anomaly and two scalars."""

    owner_id: str
    public_nodes: tuple[str, ...]
    size: int
    q_value: float
    f_value: float
    round: int = 0

    def __post_init__(self):
        nodes = tuple(sorted(set(self.public_nodes)))
        object.__setattr__(self, "public_nodes", nodes)
        if self.size != len(nodes):
            raise InputError(f"report of {self.owner_id!r}: size {self.size} != {len(nodes)} public nodes")

    @classmethod
    def make(cls, owner_id: str, nodes: Iterable[str], q_value: float, f_value: float,
             round: int = 0) -> "ParticipantReport":
        nodes = tuple(sorted(set(nodes)))
        return cls(owner_id, nodes, len(nodes), float(q_value), float(f_value), round)

    def to_record(self) -> dict:
        return {
            "owner_id": self.owner_id,
            "public_nodes": list(self.public_nodes),
            "size": self.size,
            "q_value": self.q_value,
            "f_value": self.f_value,
            "round": self.round,
        }


@dataclass(frozen=True)
class Partition:
    coalitions: tuple[tuple[str, ...], ...]
    per_coalition_error: tuple[float, ...]
    total_error: float


def sort_reports(reports: Sequence[ParticipantReport]) -> list[ParticipantReport]:
    seen = set()
    for r in reports:
        if r.owner_id in seen:
            raise InputError(f"duplicate report from owner {r.owner_id!r}")
        seen.add(r.owner_id)
    return sorted(reports, key=lambda r: (r.size, r.owner_id))


def _by_owner(reports: Iterable[ParticipantReport]) -> dict[str, ParticipantReport]:
    return {r.owner_id: r for r in reports}


def coalition_error(members: Sequence[str], by_owner: Mapping[str, ParticipantReport]) -> float:
    """Sum over members of (1 - size_i / size_C) * q_i."""
    if len(members) <= 1:
        return 0.0
    sizes = [by_owner[m].size for m in members]
    if min(sizes) == 0:
        bad = next(m for m in members if by_owner[m].size == 0)
        raise InputError(f"owner {bad!r} has an empty public anomaly inside a multi-owner coalition")
    total = sum(sizes)
    return sum((1.0 - by_owner[m].size / total) * by_owner[m].q_value for m in members)


def partition_error(partition: Sequence[Sequence[str]], reports: Sequence[ParticipantReport]) -> float:
    by_owner = _by_owner(reports)
    covered = [m for c in partition for m in c]
    if sorted(covered) != sorted(by_owner):
        raise InputError("partition must cover every reporting owner exactly once")
    return sum(coalition_error(c, by_owner) for c in partition)


def _make_partition(groups: Sequence[Sequence[str]], by_owner: Mapping[str, ParticipantReport]) -> Partition:
    coalitions = tuple(tuple(sorted(g)) for g in groups)
    errs = tuple(coalition_error(c, by_owner) for c in coalitions)
    return Partition(coalitions, errs, sum(errs))


def form_partition(sorted_reports: Sequence[ParticipantReport], theta: float = DEFAULT_THETA) -> Partition:
    """Scan owners by ascending size; an owner joins the open coalition only if every
    member's relative term ``1 - size_k / size_C`` stays within ``theta`` afterwards."""
    if not (0.0 <= theta <= 1.0):
        raise InputError(f"theta must lie in [0, 1], got {theta}")
    by_owner = _by_owner(sorted_reports)
    groups: list[list[str]] = []
    current: list[str] = []
    for r in sorted_reports:
        if r.size == 0:
            groups.append([r.owner_id])
            continue
        if not current:
            current = [r.owner_id]
            continue
        trial = current + [r.owner_id]
        total = sum(by_owner[m].size for m in trial)
        if all(1.0 - by_owner[m].size / total <= theta for m in trial):
            current = trial
        else:
            groups.append(current)
            current = [r.owner_id]
    if current:
        groups.append(current)
    return _make_partition(groups, by_owner)


def select_coalition(partition: Partition, reports: Sequence[ParticipantReport]) -> tuple[str, ...]:
    """Minimum error, then maximum total q, then the lexicographically first member list.

    Coalitions whose members all reported an empty public anomaly are only
    eligible when nothing else is.
    """
    by_owner = _by_owner(reports)
    best = None
    for coalition, err in zip(partition.coalitions, partition.per_coalition_error):
        empty = all(by_owner[m].size == 0 for m in coalition)
        key = (empty, err, -sum(by_owner[m].q_value for m in coalition), coalition)
        if best is None or key < best[0]:
            best = (key, coalition)
    return best[1] if best else ()


def select_public_anomaly(partition: Partition, reports: Sequence[ParticipantReport],
                          public_net: AttributedNetwork) -> Subgraph:
    """Union of the chosen coalition's public anomalies, reduced to one connected component."""
    by_owner = _by_owner(reports)
    coalition = select_coalition(partition, reports)
    union: set[str] = set()
    for m in coalition:
        union.update(by_owner[m].public_nodes)
    if not union:
        return Subgraph.empty(public_net.network_id)
    sub = induced_subgraph(public_net, union)
    comps = connected_components(sub)
    if len(comps) == 1:
        return sub

    def key(c: Subgraph):
        membership = sum(len(c.nodes & set(by_owner[m].public_nodes)) for m in coalition)
        return (-membership, -len(c.nodes), c.sorted_nodes())

    return min(comps, key=key)


def _set_partitions(items: Sequence[str]):
    """All set partitions via restricted growth strings."""
    n = len(items)
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i: int, top: int):
        if i == n:
            groups: list[list[str]] = [[] for _ in range(top + 1)]
            for item, lab in zip(items, labels):
                groups[lab].append(item)
            yield groups
            return
        for lab in range(top + 2):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab))

    labels[0] = 0
    yield from rec(1, 0)


def brute_force_optimal_partition(reports: Sequence[ParticipantReport]) -> Partition:
    """Exhaustive minimiser of the partition error; ties by fewer coalitions, then lexicographic."""
    if len(reports) > BRUTE_FORCE_LIMIT:
        raise InputError(f"brute force is limited to {BRUTE_FORCE_LIMIT} owners, got {len(reports)}")
    by_owner = _by_owner(reports)
    owners = sorted(by_owner)
    best = None
    for groups in _set_partitions(owners):
        try:
            p = _make_partition(groups, by_owner)
        except InputError:
            continue
        key = (p.total_error, len(p.coalitions), sorted(p.coalitions))
        if best is None or _lt(key, best[0]):
            best = (key, p)
    if best is None:
        raise InputError("no admissible partition (owners with empty public anomalies cannot be grouped)")
    coalitions = tuple(sorted(best[1].coalitions))
    return _make_partition(coalitions, by_owner)


def _lt(a, b, tol: float = 1e-12) -> bool:
    if a[0] < b[0] - tol:
        return True
    if a[0] > b[0] + tol:
        return False
    return a[1:] < b[1:]
