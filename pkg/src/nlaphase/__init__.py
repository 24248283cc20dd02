"""Phase estimation of coherent states with a probabilistic noiseless linear amplifier.

Numerical workbench covering the heralded amplifier as a two-outcome measurement,
branch quantum Fisher information, the optimal local observable and its
maximum-likelihood estimators, seeded Monte Carlo precision experiments, and the
abstention cost model.
"""

__version__ = "0.1.0"

from . import errors
from .cost import (
    CostParams,
    StrategyReport,
    breakeven_y,
    cost_direct,
    cost_postselect,
    recommend_strategy,
)
from .estimator import (
    EstimatorObservable,
    FiveOutcomeProbs,
    OutcomeProbs,
    build_observable,
    combine_weight,
    five_outcome_probs,
    mle_direct,
    mle_nla,
    outcome_probabilities,
)
from .fisher import (
    FisherBreakdown,
    binomial_tail,
    branch_breakdown,
    default_gain_grid,
    j_nla_conditional,
    min_ns_exceeding,
    qfi_coherent,
    qfi_pure,
    sweep_fraction,
    sweep_gain,
)
from .fock import (
    CoherentParams,
    FockVector,
    Tolerance,
    choose_cutoff,
    coherent_state,
    inner_product,
    phase_derivative,
)
from .kernels import CounterStream, active_backend, categorical_counts, derive_key
from .montecarlo import (
    PrecisionReport,
    SimConfig,
    TrialCounts,
    precision_from_samples,
    sample_multinomial,
    simulate_direct,
    simulate_nla,
)
from .nla import (
    BranchOutcome,
    DiagonalOperator,
    NlaParams,
    apply_branch,
    branch_derivative,
    failure_operator,
    failure_probability,
    success_operator,
    success_probability,
)

__all__ = [
    "__version__",
    "errors",
    "CoherentParams",
    "FockVector",
    "Tolerance",
    "choose_cutoff",
    "coherent_state",
    "inner_product",
    "phase_derivative",
    "NlaParams",
    "DiagonalOperator",
    "BranchOutcome",
    "success_operator",
    "failure_operator",
    "success_probability",
    "failure_probability",
    "apply_branch",
    "branch_derivative",
    "FisherBreakdown",
    "qfi_pure",
    "qfi_coherent",
    "branch_breakdown",
    "j_nla_conditional",
    "min_ns_exceeding",
    "binomial_tail",
    "sweep_gain",
    "sweep_fraction",
    "default_gain_grid",
    "EstimatorObservable",
    "OutcomeProbs",
    "FiveOutcomeProbs",
    "build_observable",
    "outcome_probabilities",
    "five_outcome_probs",
    "combine_weight",
    "mle_direct",
    "mle_nla",
    "SimConfig",
    "TrialCounts",
    "PrecisionReport",
    "sample_multinomial",
    "simulate_direct",
    "simulate_nla",
    "precision_from_samples",
    "CostParams",
    "StrategyReport",
    "cost_direct",
    "cost_postselect",
    "breakeven_y",
    "recommend_strategy",
    "CounterStream",
    "active_backend",
    "categorical_counts",
    "derive_key",
]
