"""Regularized Cahn-Hilliard-Brinkman tumour model."""

from ._core import (
    ConfigError,
    Grid,
    PotentialKind,
    PotentialSpec,
    SolverError,
    SourceModel,
    beta,
    beta_hat,
    beta_prime,
    cutoff,
    divergence_lift,
    psi,
    simulate,
    solve_nutrient,
    stationary,
    version,
)

__version__ = version()

__all__ = [
    "ConfigError",
    "Grid",
    "PotentialKind",
    "PotentialSpec",
    "SolverError",
    "SourceModel",
    "beta",
    "beta_hat",
    "beta_prime",
    "cutoff",
    "divergence_lift",
    "psi",
    "simulate",
    "solve_nutrient",
    "stationary",
]
