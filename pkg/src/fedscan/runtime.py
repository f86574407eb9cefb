"""Round loop driving participants and the coordinator, with the report privacy gate."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .alignment import AlignmentMap, q_score
from .coordinator import (DEFAULT_THETA, ParticipantReport, form_partition, select_public_anomaly,
                          sort_reports)
from .errors import InputError, PrivacyError
from .graph import AttributedNetwork, Subgraph, induced_subgraph
from .participant import (OwnerState, SearchConfig, best_public_alignment, combine,
                          detect_private_anomaly)
from .stats import ScanConfig, empirical_pvalues, scan_score

log = logging.getLogger(__name__)

REPORT_FIELDS = frozenset({"owner_id", "public_nodes", "size", "q_value", "f_value", "round"})
OBJECTIVE_TOL = 1e-12


@dataclass(frozen=True)
class FederationConfig:
    alpha: float = 0.15
    sigma: float = 0.8
    lam: float = 1.0
    theta: float = DEFAULT_THETA
    statistic: str = "BJ"
    max_rounds: int = 20
    search: SearchConfig = field(default_factory=SearchConfig)
    rng_seed: int = 0
    normalize: bool = True
    norm_scope: str = "network"

    def __post_init__(self):
        if self.max_rounds < 1:
            raise InputError("max_rounds must be >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (0.0 < self.sigma < 1.0):
            raise InputError(f"sigma must lie in (0, 1), got {self.sigma}")
        if self.lam < 0:
            raise InputError("lambda must be non-negative")

    @property
    def scan(self) -> ScanConfig:
        return ScanConfig(self.alpha, self.statistic, self.normalize, self.norm_scope)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "FederationConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        search = d.pop("search", None) or {}
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise InputError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        if "rng_seed" in d and "rng_seed" not in search:
            search = {**search, "rng_seed": d["rng_seed"]}
        return cls(search=SearchConfig(**search), **d)


@dataclass
class OwnerInput:
    """One data owner's private inputs. ``history`` (with snapshot ``t``) overrides network p-values."""

    network: AttributedNetwork
    alignment: AlignmentMap
    history: Mapping[str, Sequence[float]] | None = None
    t: int | None = None

    def resolved_network(self) -> AttributedNetwork:
        if self.history is None:
            return self.network
        T = len(next(iter(self.history.values())))
        pv = empirical_pvalues(self.history, self.t or T)
        merged = {v: pv.get(v, 1.0) for v in self.network.nodes}
        return self.network.with_pvalues(merged)


@dataclass
class FederationResult:
    rounds: list[dict]
    converged: bool
    final_U: Subgraph
    final_S: dict[str, Subgraph]
    config: dict = field(default_factory=dict)

    @property
    def objectives(self) -> list[float]:
        return [r["objective"] for r in self.rounds]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "converged": self.converged,
            "final_U": sorted(self.final_U.nodes),
            "final_S": {o: sorted(s.nodes) for o, s in sorted(self.final_S.items())},
            "rounds": self.rounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def validate_report(record: str | bytes | Mapping[str, Any], public_net: AttributedNetwork,
                    private_ids: Iterable[str] = ()) -> ParticipantReport:
    """Admit a raw owner record only if it has exactly the report fields and public node ids.

    ``private_ids`` is an optional audit canary: ids known to be private that must
    never appear in a report.
    """
    if isinstance(record, (str, bytes)):
        try:
            record = json.loads(record)
        except json.JSONDecodeError as exc:
            raise InputError(f"report is not valid JSON: {exc}") from None
    if not isinstance(record, Mapping):
        raise InputError("report must be a JSON object")
    extra = sorted(set(record) - REPORT_FIELDS)
    if extra:
        raise PrivacyError(f"report carries disallowed field {extra[0]!r}", field=extra[0])
    missing = sorted(REPORT_FIELDS - set(record))
    if missing:
        raise InputError(f"report is missing field {missing[0]!r}")
    owner, nodes = record["owner_id"], record["public_nodes"]
    if not isinstance(owner, str):
        raise InputError("owner_id must be a string")
    if not isinstance(nodes, list) or not all(isinstance(v, str) for v in nodes):
        raise InputError("public_nodes must be a list of node ids")
    private = set(private_ids) - public_net.nodes
    for v in nodes:
        if v in private:
            raise PrivacyError(f"report of {owner!r} leaks private node id {v!r}", field="public_nodes")
        if v not in public_net.nodes:
            raise InputError(f"report of {owner!r} names unknown public node {v!r}")
    for name in ("size", "round"):
        if not isinstance(record[name], int) or isinstance(record[name], bool):
            raise InputError(f"{name} must be an integer")
    for name in ("q_value", "f_value"):
        val = record[name]
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
            raise InputError(f"{name} must be a finite number")
    if record["size"] != len(set(nodes)) or len(set(nodes)) != len(nodes):
        raise InputError(f"report of {owner!r}: size does not match its node list")
    return ParticipantReport(owner, tuple(nodes), record["size"], float(record["q_value"]),
                             float(record["f_value"]), record["round"])


class MessageBus:
    """In-process transport that carries the same encoded records as the on-disk message log."""

    def __init__(self, public_net: AttributedNetwork, private_ids: Iterable[str] = ()):
        self.public_net = public_net
        self.private_ids = frozenset(private_ids)
        self.lines: list[str] = []
        self._pending: list[str] = []

    def send_report(self, report: ParticipantReport) -> None:
        payload = json.dumps(report.to_record(), sort_keys=True)
        self.lines.append(json.dumps({"channel": "report", "payload": json.loads(payload)}, sort_keys=True))
        self._pending.append(payload)

    def collect(self) -> list[ParticipantReport]:
        pending, self._pending = self._pending, []
        return [validate_report(p, self.public_net, self.private_ids) for p in pending]

    def broadcast(self, round_index: int, u: Subgraph) -> None:
        self.lines.append(json.dumps({"channel": "broadcast", "payload": {
            "round": round_index, "public_nodes": sorted(u.nodes)}}, sort_keys=True))

    def write(self, path: str | Path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.lines), encoding="utf-8")


def audit_log(lines: Iterable[str], public_net: AttributedNetwork, private_ids: Iterable[str] = ()) -> int:
    """Validate every report record of a message log; returns how many were checked."""
    private_ids = frozenset(private_ids)
    checked = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            env = json.loads(line)
        except json.JSONDecodeError:
            raise InputError(f"message log line {lineno}: not JSON") from None
        if env.get("channel") != "report":
            continue
        try:
            validate_report(env.get("payload"), public_net, private_ids)
        except (PrivacyError, InputError) as exc:
            raise type(exc)(f"message log line {lineno}: {exc}") from None
        checked += 1
    return checked


class Participant:
    """One owner's private process; it only ever emits :class:`ParticipantReport` records."""

    def __init__(self, state: OwnerState, public_net: AttributedNetwork, search: SearchConfig):
        self.state = state
        self.public_net = public_net
        self.search = search

    @property
    def owner_id(self) -> str:
        return self.state.owner_id

    def f_value(self) -> float:
        return scan_score(self.state.current_S, self.state.network, self.state.scan_cfg)

    def local_objective(self, u: Subgraph) -> float:
        return combine(self.f_value(), q_score(self.state.current_S, u, self.state.alignment), self.state.lam)

    def detect(self, u: Subgraph, first_round: bool) -> None:
        lam = 0.0 if first_round else self.state.lam
        self.state.current_S = detect_private_anomaly(self.state, u, self.search, lam=lam)

    def report(self, u: Subgraph, round_index: int) -> ParticipantReport:
        s = self.state.current_S
        u_local = best_public_alignment(self.state, self.public_net, self.search)
        q_local = q_score(s, u_local, self.state.alignment)
        q_current = q_score(s, u, self.state.alignment)
        if q_local > q_current:
            upload, q = u_local, q_local
        else:
            upload, q = u, q_current
        self.state.current_U_local = upload
        return ParticipantReport.make(self.owner_id, upload.nodes, q, self.f_value(), round_index)


def federation_objective(owners: Sequence[OwnerState], u: Subgraph) -> float:
    total = 0.0
    for st in owners:
        total += combine(scan_score(st.current_S, st.network, st.scan_cfg),
                         q_score(st.current_S, u, st.alignment), st.lam)
    return total


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_federation(cfg: FederationConfig, owners: Sequence[OwnerInput | tuple], public_net: AttributedNetwork,
                   bus: MessageBus | None = None, workers: int = 1) -> FederationResult:
    """Alternate local detection / alignment with server aggregation until U stops changing."""
    if not owners:
        raise InputError("at least one owner is required")
    participants: list[Participant] = []
    for item in owners:
        if not isinstance(item, OwnerInput):
            item = OwnerInput(*item)
        net = item.resolved_network()
        amap = item.alignment if item.alignment.sigma == cfg.sigma else item.alignment.with_sigma(cfg.sigma)
        amap.check_nodes(net, public_net)
        state = OwnerState(net.network_id, net, amap, cfg.scan, cfg.lam)
        participants.append(Participant(state, public_net, cfg.search))
    ids = [p.owner_id for p in participants]
    if len(set(ids)) != len(ids):
        raise InputError("owner network ids must be unique")
    if bus is None:
        private_ids = set().union(*(p.state.network.nodes for p in participants))
        bus = MessageBus(public_net, private_ids)

    u = Subgraph.empty(public_net.network_id)
    rounds: list[dict] = []
    converged = False
    for r in range(cfg.max_rounds):
        _map(lambda p: p.detect(u, r == 0), participants, workers)
        states = [p.state for p in participants]
        objective = federation_objective(states, u)
        scores = {p.owner_id: {"f": p.f_value(), "q": q_score(p.state.current_S, u, p.state.alignment)}
                  for p in participants}

        for rep in _map(lambda p: p.report(u, r), participants, workers):
            bus.send_report(rep)
        reports = bus.collect()
        partition = form_partition(sort_reports(reports), cfg.theta)
        candidate = select_public_anomaly(partition, reports, public_net)

        accepted = True
        if candidate.nodes != u.nodes:
            # owners score the candidate locally; only the scalar total is used
            cand_obj = sum(_map(lambda p: p.local_objective(candidate), participants, workers))
            if cand_obj < objective - OBJECTIVE_TOL * max(1.0, abs(objective)):
                accepted = False
                candidate = u
        rounds.append({
            "round": r,
            "U": sorted(u.nodes),
            "S": {p.owner_id: sorted(p.state.current_S.nodes) for p in participants},
            "scores": scores,
            "objective": objective,
            "reports": [rep.to_record() for rep in sorted(reports, key=lambda x: x.owner_id)],
            "coalitions": [list(c) for c in partition.coalitions],
            "candidate_accepted": accepted,
            "next_U": sorted(candidate.nodes),
        })
        bus.broadcast(r + 1, candidate)
        if candidate.nodes == u.nodes:
            converged = True
            break
        u = induced_subgraph(public_net, candidate.nodes)

    # objectives are non-decreasing, so the final round is also the best one
    best = max(range(len(rounds)), key=lambda i: (rounds[i]["objective"], i))
    final = rounds[best]
    final_S = {p.owner_id: induced_subgraph(p.state.network, final["S"][p.owner_id]) for p in participants}
    return FederationResult(rounds, converged, induced_subgraph(public_net, final["U"]), final_S, cfg.to_dict())
