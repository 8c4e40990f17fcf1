"""Subcopula-based monotone dependence for arbitrary-type bivariate data."""

from .empirical import (
    BivariateSample,
    DependenceMatrix,
    EmpiricalGrid,
    build_grid,
    dependence_matrix,
    empirical_subcopula,
    mu,
    mu_empirical,
    mu_tie_free,
    tie_free_normalizer,
)
from .parametric import (
    BernoulliPairModel,
    CopulaFamily,
    CurveRow,
    ParameterWarning,
    ParetoGeometricMixture,
    SupResult,
    bernoulli_mu_closed,
    bernoulli_pearson,
    bernoulli_subcopula,
    clayton_curve,
    discretize,
    kendall_clayton,
    lambda_inf_numeric,
    mu_copula_numeric,
    schweizer_wolff_numeric,
    spearman_numeric,
)
from .stats import SummaryStats, pearson_sample, summary_stats
from .subcopula import (
    AXIOM_TOL,
    AxiomViolation,
    DependenceReport,
    GridDomain,
    GridPoint,
    InvalidSubcopulaError,
    StructureError,
    Subcopula,
    d_measure,
    is_valid,
    mu_measure,
    restrict,
    transpose,
    validate,
)

__version__ = "0.1.0"
