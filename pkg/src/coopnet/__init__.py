"""Diversity and degrees of freedom of cooperative multi-antenna relay networks."""

from __future__ import annotations

__version__ = "0.1.0"

from .cuts import (
    Cut,
    FlowAnalysis,
    analyze_flow,
    brute_force_min_cut,
    cut_matrix,
    cut_value,
    dof,
    edge_disjoint_paths,
    enumerate_cuts,
    max_diversity,
    min_cut,
    min_cut_value,
    multicast_dof,
    numerical_rank,
)
from .errors import (
    CeilingExceededError,
    InsufficientDataError,
    LiftError,
    MissingCoefficientError,
    NetworkError,
    NetworkSyntaxError,
    NetworkValidationError,
    NoCodeError,
)
from .estimators import FlowAnalyzer, NetworkLifter, OutageDiversityEstimator, check_network
from .galois import (
    DeterministicNetwork,
    LiftCertificate,
    PrimeField,
    certify,
    choose_prime,
    deterministic_min_cut_rank,
    fp_det,
    fp_inv,
    fp_rank,
    lift_network,
)
from .network import (
    Edge,
    Network,
    SuperNode,
    embed_wireline,
    load_network,
    parse_network,
    sample_coefficients,
    serialize_network,
    validate,
)
from .outage import DiversityEstimate, OutageCurve, estimate_diversity, simulate_outage
from .relay import (
    achievable_dof_af,
    af_trial_ranks,
    extract_zero_error_code,
    random_relays,
    unfold,
    verify_zero_error,
)

__all__ = [
    "__version__",
    "achievable_dof_af",
    "af_trial_ranks",
    "analyze_flow",
    "brute_force_min_cut",
    "CeilingExceededError",
    "certify",
    "check_network",
    "choose_prime",
    "Cut",
    "cut_matrix",
    "cut_value",
    "deterministic_min_cut_rank",
    "DeterministicNetwork",
    "DiversityEstimate",
    "dof",
    "Edge",
    "edge_disjoint_paths",
    "embed_wireline",
    "enumerate_cuts",
    "estimate_diversity",
    "extract_zero_error_code",
    "FlowAnalysis",
    "FlowAnalyzer",
    "fp_det",
    "fp_inv",
    "fp_rank",
    "InsufficientDataError",
    "lift_network",
    "LiftCertificate",
    "LiftError",
    "load_network",
    "max_diversity",
    "min_cut",
    "min_cut_value",
    "MissingCoefficientError",
    "multicast_dof",
    "Network",
    "NetworkError",
    "NetworkLifter",
    "NetworkSyntaxError",
    "NetworkValidationError",
    "NoCodeError",
    "numerical_rank",
    "OutageCurve",
    "OutageDiversityEstimator",
    "parse_network",
    "PrimeField",
    "random_relays",
    "sample_coefficients",
    "serialize_network",
    "simulate_outage",
    "SuperNode",
    "unfold",
    "validate",
    "verify_zero_error",
]
