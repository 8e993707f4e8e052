"""Fitted and L1 finite-difference solvers for Caputo time-fractional reaction-diffusion."""

from ._fracdiff import (
    AccuracyLossError,
    CaputoWeightTable,
    ConfigError,
    DomainError,
    GradedTemporalMesh,
    NumericalFailure,
    SchemeKind,
    SpecFunConfig,
    beta,
    convergence_table,
    fitted_weights,
    gamma,
    growth_rates,
    inc_beta,
    l1_weights,
    log_gamma,
    mittag_leffler,
    nodal_weights,
    observed_rates,
    optimal_grading,
    solve_example,
    theoretical_order,
    verify_m_matrix,
)

__all__ = [
    "AccuracyLossError",
    "CaputoWeightTable",
    "ConfigError",
    "DomainError",
    "GradedTemporalMesh",
    "NumericalFailure",
    "SchemeKind",
    "SpecFunConfig",
    "beta",
    "convergence_table",
    "fitted_weights",
    "gamma",
    "growth_rates",
    "inc_beta",
    "l1_weights",
    "log_gamma",
    "mittag_leffler",
    "nodal_weights",
    "observed_rates",
    "optimal_grading",
    "solve_example",
    "theoretical_order",
    "verify_m_matrix",
]
