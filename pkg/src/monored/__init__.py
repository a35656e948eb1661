"""Monotonicity testing on hypergrids via domain reduction."""
from .grid import (
    BoolFunction,
    ContinuousFunction,
    DenseFunction,
    DomainError,
    GridDomain,
    RestrictionSpec,
    is_monotone,
    restrict,
)
from .matching import (
    ViolationMatching,
    brute_force_distance,
    distance_to_monotonicity,
    max_violation_matching,
)
from .stacks import lex_improve, stack_profile
from .line_sampling import LineWeights, hall_matching_size
from .reduction import ProductMeasure, estimate_expected_distance, sample_restriction
from .testers import TesterConfig, baseline_pair_tester, levin_tester, work_investment_levels

__version__ = "0.1.0"

__all__ = [
    "BoolFunction",
    "ContinuousFunction",
    "DenseFunction",
    "DomainError",
    "GridDomain",
    "LineWeights",
    "ProductMeasure",
    "RestrictionSpec",
    "TesterConfig",
    "ViolationMatching",
    "baseline_pair_tester",
    "brute_force_distance",
    "distance_to_monotonicity",
    "estimate_expected_distance",
    "hall_matching_size",
    "is_monotone",
    "levin_tester",
    "lex_improve",
    "max_violation_matching",
    "restrict",
    "sample_restriction",
    "stack_profile",
    "work_investment_levels",
]
