"""Empirical p-values and nonparametric scan statistics (Berk-Jones, Higher Criticism)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ContractError, InputError
from .graph import AttributedNetwork, Subgraph, is_connected

STATISTICS = ("BJ", "HC")
NORM_SCOPES = ("network", "size")


@dataclass(frozen=True)
class ScanConfig:
    """Scan-statistic settings.

    ``norm_scope`` picks the normalization constant used when ``normalize`` is on:
    ``"network"`` divides by the best score attainable in the whole network (the
    all-significant subgraph of size K, K = number of nodes with p <= alpha);
    ``"size"`` divides by the all-significant score at the subgraph's own size.
    """

    alpha: float = 0.15
    statistic: str = "BJ"
    normalize: bool = True
    norm_scope: str = "network"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        stat = self.statistic.upper()
        if stat not in STATISTICS:
            raise InputError(f"unknown statistic {self.statistic!r}; expected BJ or HC")
        object.__setattr__(self, "statistic", stat)
        if self.norm_scope not in NORM_SCOPES:
            raise InputError(f"unknown normalization scope {self.norm_scope!r}")


def empirical_pvalues(history: Mapping[str, Sequence[float]], t: int) -> dict[str, float]:
    """p(v) = fraction of the T snapshots whose value is >= the value at snapshot ``t`` (1-based)."""
    lengths = {len(s) for s in history.values()}
    if len(lengths) > 1:
        raise InputError(f"observation series have differing lengths {sorted(lengths)}")
    if not history:
        return {}
    T = lengths.pop()
    if T < 1:
        raise InputError("observation series must have length >= 1")
    if not (1 <= t <= T):
        raise InputError(f"snapshot index t={t} outside 1..{T}")
    out = {}
    for v, series in history.items():
        for x in series:
            if not math.isfinite(x) or x < 0:
                raise InputError(f"observation {x!r} for node {v!r} is not a finite non-negative number")
        cur = series[t - 1]
        out[v] = sum(1 for x in series if x >= cur) / T
    return out


def kl_divergence(a: float, b: float) -> float:
    """One-sided Bernoulli KL divergence; zero whenever a < b."""
    if not (0.0 < b < 1.0):
        raise InputError(f"b must lie in (0, 1), got {b}")
    if not (0.0 <= a <= 1.0):
        raise InputError(f"a must lie in [0, 1], got {a}")
    if a < b:
        return 0.0
    first = a * math.log(a / b) if a > 0.0 else 0.0
    second = (1.0 - a) * math.log((1.0 - a) / (1.0 - b)) if a < 1.0 else 0.0
    return first + second


def _check_counts(n_alpha: int, n: int) -> None:
    if n <= 0:
        raise InputError("subgraph size n must be >= 1")
    if not (0 <= n_alpha <= n):
        raise InputError(f"n_alpha={n_alpha} outside 0..{n}")


def bj_score(alpha: float, n_alpha: int, n: int) -> float:
    _check_counts(n_alpha, n)
    return n * kl_divergence(n_alpha / n, alpha)


def hc_score(alpha: float, n_alpha: int, n: int) -> float:
    _check_counts(n_alpha, n)
    if not (0.0 < alpha < 1.0):
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    return (n_alpha - n * alpha) / math.sqrt(n * alpha * (1.0 - alpha))


def raw_score(statistic: str, alpha: float, n_alpha: int, n: int) -> float:
    if statistic == "BJ":
        return bj_score(alpha, n_alpha, n)
    return hc_score(alpha, n_alpha, n)


def significant_count(net: AttributedNetwork, alpha: float) -> int:
    return sum(1 for p in net.pvalues.values() if p <= alpha)


def network_scale(net: AttributedNetwork, cfg: ScanConfig) -> float:
    """Normalization constant for ``norm_scope="network"``.

    An attributeless network (no significant node) is scaled as if it had one.
    """
    k = max(significant_count(net, cfg.alpha), 1)
    return raw_score(cfg.statistic, cfg.alpha, k, k)


def score_counts(cfg: ScanConfig, n_alpha: int, n: int, scale: float = 1.0) -> float:
    """Score from counts alone; ``scale`` is the network constant (ignored for size scope)."""
    if n == 0:
        return 0.0
    s = raw_score(cfg.statistic, cfg.alpha, n_alpha, n)
    if not cfg.normalize:
        return s
    if cfg.norm_scope == "size":
        return s / raw_score(cfg.statistic, cfg.alpha, n, n)
    return s / scale


def count_significant(s: Subgraph, net: AttributedNetwork, alpha: float) -> int:
    pv = net.pvalues
    return sum(1 for v in s.nodes if pv[v] <= alpha)


def scan_score(s: Subgraph, net: AttributedNetwork, cfg: ScanConfig) -> float:
    if s.network_id != net.network_id:
        raise ContractError(f"subgraph of {s.network_id!r} scored against {net.network_id!r}")
    if not s.nodes:
        return 0.0
    if not is_connected(s):
        raise ContractError("scan_score requires a connected subgraph")
    scale = network_scale(net, cfg) if cfg.normalize and cfg.norm_scope == "network" else 1.0
    return score_counts(cfg, count_significant(s, net, cfg.alpha), len(s.nodes), scale)
