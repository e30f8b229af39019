"""Session-based test for partial correlation between repeatedly observed timeseries.

Given ``N`` independent experiments, each yielding series ``X_i``, ``Y_i`` and
a confounder ``Z_i``, the test asks whether ``Y_i`` is better predicted by
``X_i`` from the same experiment than by ``X_j`` from another one, after
projecting out the confounders of both experiments from ``Y_i``.
"""

from .association import RhoMeasure, apply_rho, rho_pearson, rho_r2
from .engine import (
    PairTables,
    TestReport,
    g_statistics,
    pair_tables,
    run_test,
    symmetry_diagnostics,
    t_test,
)
from .errors import (
    ConfigError,
    DegenerateSeries,
    IllConditioned,
    ParcorrError,
    ParseError,
    StructuralError,
    ValidationError,
)
from .model import Dataset, Experiment, validate_dataset
from .projection import joint_residualize, orthonormal_basis, residualize
from .simulate import NullGenConfig, ScenarioConfig, gen_null, gen_scenario, monte_carlo

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Dataset",
    "DegenerateSeries",
    "Experiment",
    "IllConditioned",
    "NullGenConfig",
    "PairTables",
    "ParcorrError",
    "ParseError",
    "RhoMeasure",
    "ScenarioConfig",
    "StructuralError",
    "TestReport",
    "ValidationError",
    "apply_rho",
    "g_statistics",
    "gen_null",
    "gen_scenario",
    "joint_residualize",
    "monte_carlo",
    "orthonormal_basis",
    "pair_tables",
    "residualize",
    "rho_pearson",
    "rho_r2",
    "run_test",
    "symmetry_diagnostics",
    "t_test",
    "validate_dataset",
]
