"""Point-exposure effect estimators.

All quantities are plain functionals of per-arm outcome means: the mean
difference (ATE), the ratio of arm means (which identifies the relative
effect among the exposed when exposure is necessary for the outcome and
unaffected by treatment), sharp bounds on the corresponding absolute effect,
stratum-conditional ratios, a weighted marginal ratio under the
deterministic-outcome assumption, and the excess fraction (1 - ratio, the
quantity usually reported as vaccine efficacy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import inference
from .data import MODE_BINARY, MODE_NONNEG, ArmSummary
from .errors import EstimationError, PositivityError

SCALE_DIFFERENCE = "difference"
SCALE_RATIO = "ratio"
SCALE_FRACTION = "fraction"


@dataclass(frozen=True)
class EstimateWithCI:
    estimand: str
    point: float
    ci_lower: float
    ci_upper: float
    level: float
    scale: str
    method: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must be in (0, 1), got {self.level}")
        if not (math.isnan(self.ci_lower) or math.isnan(self.ci_upper)):
            if not self.ci_lower <= self.point <= self.ci_upper:
                raise ValueError(
                    f"{self.estimand}: interval [{self.ci_lower}, {self.ci_upper}] "
                    f"does not contain point {self.point}"
                )

    def to_json_dict(
        self, n_per_arm: tuple[int, int] | None = None, orientation_swapped: bool = False
    ) -> dict:
        return {
            "estimand": self.estimand,
            "point": self.point,
            "ci": [self.ci_lower, self.ci_upper],
            "level": self.level,
            "method": self.method,
            "scale": self.scale,
            "orientation_swapped": orientation_swapped,
            "n_per_arm": list(n_per_arm) if n_per_arm is not None else None,
        }


@dataclass(frozen=True)
class BoundsEstimate:
    """Sharp lower/upper bounds on the absolute effect among the exposed."""

    lower: EstimateWithCI
    upper: EstimateWithCI
    orientation_swapped: bool = False


@dataclass(frozen=True)
class MarginalCdeEstimate:
    """Weighted marginal ratio and its complement (absolute per-exposure effect)."""

    ratio: EstimateWithCI
    absolute_ppe: EstimateWithCI


def _check_point_mode(summary: ArmSummary) -> None:
    if summary.mode not in (MODE_BINARY, MODE_NONNEG):
        raise EstimationError("point-outcome estimators require a point mode summary")


def _corrected(summary: ArmSummary) -> ArmSummary:
    """Continuity correction: add 0.5 events and 1 subject per arm (binary)."""
    if summary.mode != MODE_BINARY:
        raise EstimationError("continuity correction applies to binary mode only")
    n0, n1 = summary.n
    m0, m1 = summary.mean_outcome
    c0 = (m0 * n0 + 0.5) / (n0 + 1)
    c1 = (m1 * n1 + 0.5) / (n1 + 1)
    return replace(
        summary,
        n=(n0 + 1, n1 + 1),
        mean_outcome=(c0, c1),
        var_outcome=(c0 * (1 - c0), c1 * (1 - c1)),
    )


def estimate_ate(summary: ArmSummary, level: float = 0.95) -> EstimateWithCI:
    """Mean outcome difference, vaccine minus control."""
    _check_point_mode(summary)
    m0, m1 = summary.mean_outcome
    v0, v1 = summary.var_outcome
    n0, n1 = summary.n
    iv = inference.difference_ci_from_variances(m1, v1, n1, m0, v0, n0, level)
    return EstimateWithCI(
        estimand="ate",
        point=m1 - m0,
        ci_lower=iv.lower,
        ci_upper=iv.upper,
        level=level,
        scale=SCALE_DIFFERENCE,
        method=inference.WALD_DIFFERENCE,
        warnings=iv.warnings,
    )


def _ratio_with_ci(
    m1: float,
    v1: float,
    n1: int,
    m0: float,
    v0: float,
    n0: int,
    level: float,
    estimand: str,
    method_kind: str,
) -> EstimateWithCI:
    if m0 <= 0.0:
        raise EstimationError(
            f"{estimand}: zero control-arm mean; the ratio is undefined in-sample"
        )
    point = m1 / m0
    if m1 <= 0.0:
        # Zero numerator: point 0 with a one-sided-informative interval.
        return EstimateWithCI(
            estimand=estimand,
            point=0.0,
            ci_lower=0.0,
            ci_upper=math.inf,
            level=level,
            scale=SCALE_RATIO,
            method=method_kind,
            warnings=("zero numerator: upper limit not identified by log-delta",),
        )
    if method_kind == inference.FIELLER_RATIO:
        iv = inference.fieller_ratio_ci(m1, v1 / n1, m0, v0 / n0, level)
    else:
        iv = inference.ratio_ci_from_variances(m1, v1 / n1, m0, v0 / n0, level)
    return EstimateWithCI(
        estimand=estimand,
        point=point,
        ci_lower=iv.lower,
        ci_upper=iv.upper,
        level=level,
        scale=SCALE_RATIO,
        method=method_kind,
        warnings=iv.warnings,
    )


def estimate_relative_cece(
    summary: ArmSummary,
    level: float = 0.95,
    method: str = inference.LOG_DELTA_RATIO,
    continuity_correction: bool = False,
) -> EstimateWithCI:
    """Ratio of arm means: the identified relative effect among the exposed.

    The same number is simultaneously the relative effect conditional on
    exposure, the relative principal-stratum effect, and the relative ATE.
    """
    _check_point_mode(summary)
    if continuity_correction and (
        summary.mean_outcome[0] == 0.0 or summary.mean_outcome[1] == 0.0
    ):
        summary = _corrected(summary)
    m0, m1 = summary.mean_outcome
    v0, v1 = summary.var_outcome
    n0, n1 = summary.n
    return _ratio_with_ci(m1, v1, n1, m0, v0, n0, level, "relative_cece", method)


def bound_absolute_cece(
    summary: ArmSummary, level: float = 0.95
) -> BoundsEstimate:
    """Sharp bounds on the absolute effect among the exposed (binary outcome).

    Lower bound: the mean difference (attained when everybody is exposed).
    Upper bound: one minus the ratio of means (attained when every exposed,
    untreated subject experiences the outcome).  Arms are re-oriented so the
    control mean is the larger one; the swap is recorded.
    """
    if summary.mode != MODE_BINARY:
        raise EstimationError("absolute bounds require binary-point mode")
    swapped = summary.mean_outcome[0] < summary.mean_outcome[1]
    if swapped:
        summary = replace(
            summary,
            n=summary.n[::-1],
            mean_outcome=summary.mean_outcome[::-1],
            var_outcome=summary.var_outcome[::-1],
        )
    m0, m1 = summary.mean_outcome
    if m0 <= 0.0:
        raise EstimationError("upper bound undefined: zero control-arm mean")
    v0, v1 = summary.var_outcome
    n0, n1 = summary.n

    diff_iv = inference.difference_ci_from_variances(m0, v0, n0, m1, v1, n1, level)
    lower = EstimateWithCI(
        estimand="acece_lower",
        point=m0 - m1,
        ci_lower=diff_iv.lower,
        ci_upper=diff_iv.upper,
        level=level,
        scale=SCALE_DIFFERENCE,
        method=inference.WALD_DIFFERENCE,
        warnings=diff_iv.warnings,
    )
    ratio = _ratio_with_ci(
        m1, v1, n1, m0, v0, n0, level, "acece_upper", inference.LOG_DELTA_RATIO
    )
    upper = EstimateWithCI(
        estimand="acece_upper",
        point=1.0 - ratio.point,
        ci_lower=1.0 - ratio.ci_upper,
        ci_upper=1.0 - ratio.ci_lower,
        level=level,
        scale=SCALE_FRACTION,
        method=ratio.method,
        warnings=ratio.warnings,
    )
    return BoundsEstimate(lower=lower, upper=upper, orientation_swapped=swapped)


def estimate_conditional_cde(
    summary: ArmSummary, stratum: str, level: float = 0.95
) -> EstimateWithCI:
    """Within-stratum ratio of arm means (per-exposure effect given L)."""
    _check_point_mode(summary)
    if summary.strata is None:
        raise EstimationError("no strata present in summary")
    if stratum not in summary.strata:
        raise EstimationError(f"unknown stratum: {stratum!r}")
    n0, n1 = summary.n_by_stratum[stratum]
    if n0 == 0 or n1 == 0:
        raise PositivityError(
            f"stratum {stratum!r} has an empty arm cell (exposure-positivity analogue)"
        )
    m0, m1 = summary.mean_by_stratum[stratum]
    v0, v1 = summary.var_by_stratum[stratum]
    return _ratio_with_ci(
        m1, v1, n1, m0, v0, n0, level, f"conditional_cde[{stratum}]",
        inference.LOG_DELTA_RATIO,
    )


def estimate_marginal_cde_deterministic(
    summary: ArmSummary, level: float = 0.95, assume_deterministic: bool = False
) -> MarginalCdeEstimate:
    """Weighted marginal ratio under the deterministic-outcome assumption.

    Valid only when an exposed, untreated subject is certain to experience
    the outcome; the caller must assert that assumption explicitly.
    """
    if not assume_deterministic:
        raise EstimationError(
            "marginal per-exposure ratio requires explicitly asserting the "
            "deterministic-outcome assumption (assume_deterministic=True)"
        )
    _check_point_mode(summary)
    if summary.strata is None:
        raise EstimationError("no strata present in summary")

    point = 0.0
    var = 0.0
    weight_total = 0.0
    for code in summary.strata:
        n0, n1 = summary.n_by_stratum[code]
        if n0 == 0 or n1 == 0:
            raise PositivityError(f"stratum {code!r} has an empty arm cell")
        m0, m1 = summary.mean_by_stratum[code]
        if m0 <= 0.0:
            raise EstimationError(f"stratum {code!r}: zero control-arm mean")
        v0, v1 = summary.var_by_stratum[code]
        w = summary.stratum_weights[code]
        r = m1 / m0
        point += w * r
        if m1 > 0.0:
            var += (w * r) ** 2 * (v1 / (n1 * m1**2) + v0 / (n0 * m0**2))
        weight_total += w
    if abs(weight_total - 1.0) > 1e-12:
        raise EstimationError(f"stratum weights sum to {weight_total}, expected 1")

    half = inference.normal_quantile(0.5 * (1.0 + level)) * math.sqrt(var)
    ratio = EstimateWithCI(
        estimand="marginal_cde",
        point=point,
        ci_lower=point - half,
        ci_upper=point + half,
        level=level,
        scale=SCALE_RATIO,
        method="delta-weighted-ratio",
    )
    ppe = EstimateWithCI(
        estimand="marginal_absolute_ppe",
        point=1.0 - point,
        ci_lower=1.0 - (point + half),
        ci_upper=1.0 - (point - half),
        level=level,
        scale=SCALE_FRACTION,
        method="delta-weighted-ratio",
    )
    return MarginalCdeEstimate(ratio=ratio, absolute_ppe=ppe)


def estimate_excess_fraction(
    summary: ArmSummary,
    level: float = 0.95,
    continuity_correction: bool = False,
) -> EstimateWithCI:
    """One minus the ratio of arm means: the excess fraction among the exposed.

    This is the quantity commonly reported as the vaccine efficacy.
    """
    ratio = estimate_relative_cece(
        summary, level=level, continuity_correction=continuity_correction
    )
    upper = 1.0 - ratio.ci_lower
    lower = 1.0 - ratio.ci_upper if math.isfinite(ratio.ci_upper) else -math.inf
    return EstimateWithCI(
        estimand="excess_fraction",
        point=1.0 - ratio.point,
        ci_lower=lower,
        ci_upper=upper,
        level=level,
        scale=SCALE_FRACTION,
        method=ratio.method,
        warnings=ratio.warnings,
    )
