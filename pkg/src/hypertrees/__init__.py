"""Spanning-tree counts in random regular uniform hypergraphs.

The package covers the pipeline from finite experiments to limit
theory: a configuration-model sampler with structural predicates and
cycle censuses, exact rational moment formulas for the number of
spanning trees, power-series and spectral limits for the moment ratio,
the phase threshold in the edge size, and the saddle-point constants
behind the second-moment asymptotics.  The ``hypertrees`` console
script exposes each piece as a subcommand.
"""

from .errors import (
    BoundaryDominatesError,
    BudgetExceededError,
    DegenerateParametersError,
    DivisibilityError,
    DomainError,
    HypertreesError,
    IntegralityError,
    ParameterError,
    RejectionLimitError,
)
from .model import (
    Configuration,
    CycleCensus,
    Hypergraph,
    ModelParams,
    admissible_orders,
    census_cycles,
    count_spanning_trees,
    has_spanning_tree,
    is_connected,
    is_simple,
    is_spanning_tree,
    project,
    sample_configuration,
    sample_simple_hypergraph,
    validate_params,
)
from .exact import (
    count_uniform_trees,
    expected_tree_count,
    log_tree_count_second_moment,
    tree_count_second_moment,
)
from .spectral import (
    SpectralPair,
    asymptotic_tree_count,
    second_moment_ratio,
    spectral_pair,
    sample_limit,
    sample_limit_batch,
    variance_sum,
)
from .threshold import Phase, ThresholdReport, classify, rho, rho_bounds
from .laplace import (
    LaplacePoint,
    LaplacePrefactors,
    laplace_prefactors,
    maximize_phi,
    phi,
    stationary_point,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryDominatesError",
    "BudgetExceededError",
    "Configuration",
    "CycleCensus",
    "DegenerateParametersError",
    "DivisibilityError",
    "DomainError",
    "Hypergraph",
    "HypertreesError",
    "IntegralityError",
    "LaplacePoint",
    "LaplacePrefactors",
    "ModelParams",
    "ParameterError",
    "Phase",
    "RejectionLimitError",
    "SpectralPair",
    "ThresholdReport",
    "admissible_orders",
    "asymptotic_tree_count",
    "census_cycles",
    "classify",
    "count_spanning_trees",
    "count_uniform_trees",
    "expected_tree_count",
    "has_spanning_tree",
    "is_connected",
    "is_simple",
    "is_spanning_tree",
    "laplace_prefactors",
    "log_tree_count_second_moment",
    "maximize_phi",
    "phi",
    "project",
    "rho",
    "rho_bounds",
    "sample_configuration",
    "sample_limit",
    "sample_limit_batch",
    "sample_simple_hypergraph",
    "second_moment_ratio",
    "spectral_pair",
    "stationary_point",
    "tree_count_second_moment",
    "validate_params",
    "variance_sum",
]
