"""Federated detection of correlated anomaly subgraphs across private attributed networks."""

from .alignment import AlignmentMap, q_score
from .coordinator import (ParticipantReport, Partition, brute_force_optimal_partition, form_partition,
                          partition_error, select_public_anomaly, sort_reports)
from .errors import ContractError, InputError, PrivacyError
from .graph import AttributedNetwork, Subgraph, induced_subgraph, is_connected, subgraph_set_op
from .kernels import BACKEND
from .participant import (OwnerState, SearchConfig, best_public_alignment, detect_private_anomaly,
                          exhaustive_connected_argmax)
from .runtime import (FederationConfig, FederationResult, MessageBus, OwnerInput, federation_objective,
                      run_federation, validate_report)
from .stats import ScanConfig, bj_score, empirical_pvalues, hc_score, kl_divergence, scan_score
from .synth import MetricsReport, ScenarioSpec, anchor_count, evaluate_metrics, generate_scenario

__version__ = "0.1.0"

__all__ = [
    "AlignmentMap", "AttributedNetwork", "BACKEND", "ContractError", "FederationConfig", "FederationResult",
    "InputError", "MessageBus", "MetricsReport", "OwnerInput", "OwnerState", "ParticipantReport", "Partition",
    "PrivacyError", "ScanConfig", "ScenarioSpec", "SearchConfig", "Subgraph", "anchor_count",
    "best_public_alignment", "bj_score", "brute_force_optimal_partition", "detect_private_anomaly",
    "empirical_pvalues", "evaluate_metrics", "exhaustive_connected_argmax", "federation_objective",
    "form_partition", "generate_scenario", "hc_score", "induced_subgraph", "is_connected", "kl_divergence",
    "partition_error", "q_score", "run_federation", "scan_score", "select_public_anomaly", "sort_reports",
    "subgraph_set_op", "validate_report",
]
