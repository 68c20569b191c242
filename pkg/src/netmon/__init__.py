"""Randomized multi-sensor monitoring strategies for networked systems.

The package computes mixed sensor-placement strategies maximizing the lowest
expected post-security level of a system's components, with matching lower
and upper bound certificates, plus column-generation and multiplicative-
weights baselines and brute-force oracles for verification.
"""
from .errors import (CapacityError, InputError, InvariantViolation,
                     NetmonError, SolverFailure)
from .instance import (AttackerStrategy, Instance, MarginalVector,
                       MixedStrategy, Placement, Violation, check_cover,
                       check_packing, evaluate_strategy, k_star,
                       location_criticality, marginals_of, node_basis,
                       optimal_marginals, packing_weight_sum, post_security,
                       validate)
from .decomposition import decompose
from .pipeline import (ApproxSolution, disjoint_solution,
                       homogeneous_solution, max_set_packing, min_set_cover,
                       solve_approx, solve_gcs, upper_bound)
from .colgen import CgResult, price, solve_cg
from .mwu import MwuResult, best_response, eta, iterations_for_gap, solve_mwu
from .oracle import brute_gcs, brute_ub, solve_exact
from .fileio import bundled_example, load_instance, save_instance
from .generators import generate, security_level_from_index
from .reporting import SweepLimits, SweepReport, run_sweep, sample_schedule

__version__ = "0.1.0"

__all__ = [
    "AttackerStrategy", "ApproxSolution", "CapacityError", "CgResult",
    "InputError", "Instance", "InvariantViolation", "MarginalVector",
    "MixedStrategy", "MwuResult", "NetmonError", "Placement", "SolverFailure",
    "SweepLimits", "SweepReport", "Violation", "best_response", "brute_gcs",
    "brute_ub", "bundled_example", "check_cover", "check_packing", "decompose",
    "disjoint_solution", "eta", "evaluate_strategy", "generate",
    "homogeneous_solution", "iterations_for_gap", "k_star", "load_instance",
    "location_criticality", "marginals_of", "max_set_packing",
    "min_set_cover", "node_basis", "optimal_marginals", "packing_weight_sum",
    "post_security", "price", "run_sweep", "sample_schedule", "save_instance",
    "security_level_from_index", "solve_approx", "solve_cg", "solve_exact",
    "solve_gcs", "solve_mwu", "upper_bound", "validate",
]
