"""Power-law tails under an uncertain exponent: Pareto mixtures, the bias of
plugging in the mean exponent, and Monte Carlo studies of tail-index
estimators."""

from ._validation import DegenerateTailError, DomainError, InvalidParameterError, TailgapError
from .distributions import (
    ContinuousMetaSpec,
    MetaDistribution,
    ParetoLaw,
    ParetoMixture,
    StableParams,
    alpha_bar,
    alpha_star,
    discretize_meta,
    mixture_pdf,
    mixture_survival,
    pareto_isf,
    pareto_mean,
    pareto_pdf,
    pareto_quantile,
    pareto_survival,
    sample_mixture,
    sample_pareto,
    sample_stable,
)
from .estimators import (
    EstimateResult,
    HillEstimator,
    LogLogTailEstimator,
    ParetoMLEEstimator,
    empirical_survival,
    hill_estimator,
    loglog_slope,
    pareto_mle,
)
from .experiments import (
    StudyConfig,
    StudyReport,
    emit_figure1,
    seed_stream,
    study_mixture_bias,
    study_stable,
)
from .metaprob import (
    GapReport,
    PayoffSpec,
    TailConstant,
    asymptotic_gap,
    clipping_curve,
    density_gap,
    functional_bias,
    gap_crossover,
    limit_convergence,
    tail_constant,
)

__version__ = "0.1.0"
