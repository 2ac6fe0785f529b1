"""Universal prediction for discrete memoryless sources.

A one-parameter family of predictors that interpolates between Bayes
mixtures (alpha = 1) and the normalized maximum likelihood distribution
(alpha -> infinity), together with worst-case, average and alpha-regret
evaluation, luckiness-weighted variants, large-n regret formulas and
brute-force oracles for cross-checking every fast path.
"""

from __future__ import annotations

from .exceptions import InfeasibleModelError, NumericError, UnsupportedError
from .numerics import (
    LOG_TWO,
    digamma,
    log_gamma,
    log_multinomial,
    log_multivariate_beta,
    log_sum_exp,
    log_sum_exp_array,
    xlogy,
)
from .typeclass import (
    CountVector,
    count_vector_total,
    enumerate_count_vectors,
    iter_with_log_multiplicity,
    reduce_over_type_classes,
)
from .predictors import (
    AlphaNML,
    DirichletParams,
    LuckinessAlphaNML,
    LuckinessNML,
    Mixture,
    NML,
    NormalizerCache,
    PredictorSpec,
    conditional_distribution,
    cumulative_log_loss,
    kt,
    laplace,
    log_dirichlet_alpha_integral,
    log_joint,
    log_luckiness_supremum,
    log_ml,
    log_normalizer,
    tilted_params,
)
from .regret import (
    RegretReport,
    SimplexPoint,
    TypeClassTable,
    alpha_regret,
    alpha_split_check,
    asymptotic_min_alpha_regret,
    asymptotic_rmax,
    average_regret,
    figure1_table,
    infinity_split_check,
    maximize_on_simplex,
    predictor_kl,
    renyi_divergence_vs_predictor,
    sibson_mi_alpha,
    sibson_mi_infinity,
    w_alpha_closed,
    w_alpha_direct,
    worst_case_regret,
)
from .luckiness import (
    LuckinessFunction,
    TiltedPrior,
    average_luckiness_regret,
    luckiness_alpha_nml_log_joint,
    luckiness_alpha_regret,
    luckiness_alpha_regret_supform,
    luckiness_nml_log_joint,
    worst_case_luckiness_regret,
)
from .oracle import (
    OracleConfig,
    brute_sequence_sum,
    brute_simplex_max,
    sequence_counts,
    sequence_max_likelihood_log_prob,
    sequential_mixture_log_prob,
    simplex_quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaNML",
    "CountVector",
    "DirichletParams",
    "InfeasibleModelError",
    "LOG_TWO",
    "LuckinessAlphaNML",
    "LuckinessFunction",
    "LuckinessNML",
    "Mixture",
    "NML",
    "NormalizerCache",
    "NumericError",
    "OracleConfig",
    "PredictorSpec",
    "RegretReport",
    "SimplexPoint",
    "TiltedPrior",
    "TypeClassTable",
    "UnsupportedError",
    "alpha_regret",
    "alpha_split_check",
    "asymptotic_min_alpha_regret",
    "asymptotic_rmax",
    "average_luckiness_regret",
    "average_regret",
    "brute_sequence_sum",
    "brute_simplex_max",
    "conditional_distribution",
    "count_vector_total",
    "cumulative_log_loss",
    "digamma",
    "enumerate_count_vectors",
    "figure1_table",
    "infinity_split_check",
    "iter_with_log_multiplicity",
    "kt",
    "laplace",
    "log_dirichlet_alpha_integral",
    "log_gamma",
    "log_joint",
    "log_luckiness_supremum",
    "log_ml",
    "log_multinomial",
    "log_multivariate_beta",
    "log_normalizer",
    "log_sum_exp",
    "log_sum_exp_array",
    "luckiness_alpha_nml_log_joint",
    "luckiness_alpha_regret",
    "luckiness_alpha_regret_supform",
    "luckiness_nml_log_joint",
    "maximize_on_simplex",
    "predictor_kl",
    "reduce_over_type_classes",
    "renyi_divergence_vs_predictor",
    "sequence_counts",
    "sequence_max_likelihood_log_prob",
    "sequential_mixture_log_prob",
    "sibson_mi_alpha",
    "sibson_mi_infinity",
    "simplex_quadrature",
    "tilted_params",
    "w_alpha_closed",
    "w_alpha_direct",
    "worst_case_luckiness_regret",
    "worst_case_regret",
    "xlogy",
]
