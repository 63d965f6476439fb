"""Signed-support recovery for the drift of stochastic differential equations."""

from .basis import LinearBasis, MassSpringBasis, MonomialBasis, get_basis
from .ensembles import (
    DriftMatrix, GraphSpec, gen_dense, gen_dense_signed, gen_graph, gen_laplacian,
    gen_signed_regular, gen_sparse_shift,
)
from .estimator import (
    RlsConfig, SparseDriftEstimator, ThresholdDriftEstimator, build_normal_equations,
    proposition1_check, recover, solve_rls, threshold_estimator,
)
from .lyapunov import assumption_report, solve_continuous, solve_discrete
from .sim import Trajectory, simulate_continuous, simulate_discrete, simulate_mass_spring

__version__ = "0.1.0"

__all__ = [
    "DriftMatrix", "GraphSpec", "LinearBasis", "MassSpringBasis", "MonomialBasis", "RlsConfig",
    "SparseDriftEstimator", "ThresholdDriftEstimator", "Trajectory", "assumption_report",
    "build_normal_equations", "gen_dense", "gen_dense_signed", "gen_graph", "gen_laplacian",
    "gen_signed_regular", "gen_sparse_shift", "get_basis", "proposition1_check", "recover",
    "simulate_continuous", "simulate_discrete", "simulate_mass_spring", "solve_continuous",
    "solve_discrete", "solve_rls", "threshold_estimator",
]
