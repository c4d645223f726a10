"""Exposure-conditional vaccine effects from randomized trial data.

Estimates causal effects conditional on (unmeasured) exposure: the relative
effect is point-identified by the ratio of arm means, the absolute effect is
sharply bounded, a one-parameter sensitivity analysis pins it down exactly,
and discrete-time survival machinery extends everything to censored
follow-up.  A counterfactual simulator with brute-force oracles backs every
identification formula with an executable check.
"""

__version__ = "0.1.0"

from .data import (
    MODE_BINARY,
    MODE_NONNEG,
    MODE_TTE,
    ArmSummary,
    DiscreteEventTable,
    SubjectRecord,
    SubjectTable,
    build_event_table,
    load_subject_table,
    summarize_arms,
    write_subject_table,
)
from .errors import CeceError, EstimationError, InputError, PositivityError
from .estimators import (
    BoundsEstimate,
    EstimateWithCI,
    MarginalCdeEstimate,
    bound_absolute_cece,
    estimate_ate,
    estimate_conditional_cde,
    estimate_excess_fraction,
    estimate_marginal_cde_deterministic,
    estimate_relative_cece,
)
from .inference import Interval, IntervalMethod, normal_quantile
from .sensitivity import (
    SensitivityCurve,
    SensitivityPoint,
    acece_from_exposure_risk,
    acece_from_outcome_risk,
    sensitivity_sweep,
)
from .simulator import (
    CounterfactualTable,
    LongitudinalBlock,
    SimulationConfig,
    misclassify_outcome,
    oracle_point_effects,
    oracle_survival_effects,
    simulate_point_trial,
    simulate_survival_trial,
)
from .survival import (
    HazardSeries,
    IncidenceSeries,
    absolute_cece_bounds_curve,
    cumulative_incidence,
    discrete_hazards,
    incidence_at,
    relative_cece_curve,
)

__all__ = [
    "__version__",
    "MODE_BINARY",
    "MODE_NONNEG",
    "MODE_TTE",
    "ArmSummary",
    "DiscreteEventTable",
    "SubjectRecord",
    "SubjectTable",
    "build_event_table",
    "load_subject_table",
    "summarize_arms",
    "write_subject_table",
    "CeceError",
    "EstimationError",
    "InputError",
    "PositivityError",
    "BoundsEstimate",
    "EstimateWithCI",
    "MarginalCdeEstimate",
    "bound_absolute_cece",
    "estimate_ate",
    "estimate_conditional_cde",
    "estimate_excess_fraction",
    "estimate_marginal_cde_deterministic",
    "estimate_relative_cece",
    "Interval",
    "IntervalMethod",
    "normal_quantile",
    "SensitivityCurve",
    "SensitivityPoint",
    "acece_from_exposure_risk",
    "acece_from_outcome_risk",
    "sensitivity_sweep",
    "CounterfactualTable",
    "LongitudinalBlock",
    "SimulationConfig",
    "misclassify_outcome",
    "oracle_point_effects",
    "oracle_survival_effects",
    "simulate_point_trial",
    "simulate_survival_trial",
    "HazardSeries",
    "IncidenceSeries",
    "absolute_cece_bounds_curve",
    "cumulative_incidence",
    "discrete_hazards",
    "incidence_at",
    "relative_cece_curve",
]
