"""Stochastic-trend counting and attractor-space hypothesis tests via CCA on a sine basis."""

from cotrend.basis import BasisKind, DesignMatrix, default_K, design_matrix, kl_basis_value
from cotrend.cca import CcaOutput, SeriesPanel, moment, squared_canonical_correlations
from cotrend.critical_values import (
    CriticalValueTable,
    NormKind,
    build_table,
    critical_value,
    default_table,
)
from cotrend.hypotheses import (
    DecisionOutcome,
    HypothesisKind,
    HypothesisSpec,
    Rule,
    build_aggregation_hypothesis,
    build_autonomy_hypothesis,
    build_balanced_growth_hypothesis,
    decide,
    orthogonal_complement,
    rank_profile,
    subsystems,
)
from cotrend.limitdist import (
    confidence_stripe,
    simulate_zeta,
    zeta1_cdf,
    zeta1_mean,
    zeta1_pdf,
    zeta1_quantile,
)
from cotrend.trends import (
    Method,
    estimate_s,
    estimate_s_argmax_alt,
    estimate_s_maxgap,
    estimate_s_sequence,
    tau,
    test_statistic,
)

__version__ = "0.1.0"
