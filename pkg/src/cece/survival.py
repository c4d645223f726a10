"""Discrete-time survival identification for exposure-conditional effects.

Per-arm interval hazards are event counts over the censoring-adjusted risk
set; cumulative incidences accumulate hazards product-limit style.  The
relative effect curve is the ratio of cumulative incidences, and the absolute
effect is bounded at each interval by the incidence difference (below) and
one minus the incidence ratio (above).  All estimands stay on the risk scale;
hazards are internal quantities, never reported as effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import inference
from .data import DiscreteEventTable
from .errors import EstimationError
from .estimators import (
    SCALE_DIFFERENCE,
    SCALE_FRACTION,
    SCALE_RATIO,
    BoundsEstimate,
    EstimateWithCI,
)


@dataclass(frozen=True)
class HazardSeries:
    """Per-arm discrete hazards h(a, k) with their effective risk sets.

    ``defined[a, k]`` is False when the censoring-adjusted denominator is
    empty; the hazard value there is NaN.
    """

    hazard: np.ndarray  # (2, K) float
    defined: np.ndarray  # (2, K) bool
    effective_at_risk: np.ndarray  # (2, K) int: at_risk - censored
    events: np.ndarray  # (2, K) int

    @property
    def interval_count(self) -> int:
        return self.hazard.shape[1]


@dataclass(frozen=True)
class IncidenceSeries:
    """Cumulative incidences mu(a, k) with Greenwood-type variances.

    ``valid_through[a]`` is the last interval (1-based) with a defined
    incidence; identification stops at the first empty risk set.
    """

    incidence: np.ndarray  # (2, K) float
    variance: np.ndarray  # (2, K) float
    valid_through: tuple[int, int]

    @property
    def interval_count(self) -> int:
        return self.incidence.shape[1]


def discrete_hazards(table: DiscreteEventTable) -> HazardSeries:
    """h(a, k) = events / (at_risk - censored), NaN-flagged when empty."""
    effective = table.at_risk - table.censored
    defined = effective > 0
    hazard = np.full(effective.shape, np.nan)
    np.divide(table.events, effective, out=hazard, where=defined)
    return HazardSeries(
        hazard=hazard,
        defined=defined,
        effective_at_risk=effective,
        events=table.events.copy(),
    )


def cumulative_incidence(hazards: HazardSeries) -> IncidenceSeries:
    """Product-limit accumulation of interval hazards.

    mu(a, k) = 1 - prod_{j<=k} (1 - h(a, j)).  The variance is the Greenwood
    accumulation sum h_j / (n_j (1 - h_j)) scaled by the squared survival,
    which reduces exactly to the binomial variance when nothing is censored.
    """
    k = hazards.interval_count
    incidence = np.full((2, k), np.nan)
    variance = np.full((2, k), np.nan)
    valid_through = [0, 0]
    for a in (0, 1):
        surv = 1.0
        gw_sum = 0.0
        for j in range(k):
            if not hazards.defined[a, j]:
                break
            h = hazards.hazard[a, j]
            n_eff = hazards.effective_at_risk[a, j]
            surv *= 1.0 - h
            if h < 1.0:
                gw_sum += h / (n_eff * (1.0 - h))
                variance[a, j] = surv * surv * gw_sum
            else:
                variance[a, j] = 0.0
            incidence[a, j] = 1.0 - surv
            valid_through[a] = j + 1
    return IncidenceSeries(
        incidence=incidence,
        variance=variance,
        valid_through=(valid_through[0], valid_through[1]),
    )


def incidence_at(series: IncidenceSeries, arm: int, k: int) -> float:
    """mu(arm, k) for 1-based interval k, checking identifiability."""
    if not 1 <= k <= series.interval_count:
        raise EstimationError(f"interval {k} outside 1..{series.interval_count}")
    if k > series.valid_through[arm]:
        raise EstimationError(
            f"arm {arm}: incidence not identified past interval "
            f"{series.valid_through[arm]} (empty risk set)"
        )
    return float(series.incidence[arm, k - 1])


def relative_cece_curve(
    incidences: IncidenceSeries, level: float = 0.95
) -> list[EstimateWithCI | None]:
    """Ratio of cumulative incidences per interval.

    Entries are None where the ratio is unavailable (zero control-arm
    incidence or incidence not identified at that interval).
    """
    out: list[EstimateWithCI | None] = []
    horizon = min(incidences.valid_through)
    for j in range(incidences.interval_count):
        if j >= horizon:
            out.append(None)
            continue
        mu0 = incidences.incidence[0, j]
        mu1 = incidences.incidence[1, j]
        if mu0 <= 0.0:
            out.append(None)
            continue
        point = mu1 / mu0
        if mu1 <= 0.0:
            out.append(
                EstimateWithCI(
                    estimand=f"rcece[k={j + 1}]",
                    point=0.0,
                    ci_lower=0.0,
                    ci_upper=math.inf,
                    level=level,
                    scale=SCALE_RATIO,
                    method=inference.LOG_DELTA_INCIDENCE_RATIO,
                    warnings=("zero numerator: upper limit not identified",),
                )
            )
            continue
        iv = inference.incidence_ratio_ci(
            mu1, incidences.variance[1, j], mu0, incidences.variance[0, j], level
        )
        out.append(
            EstimateWithCI(
                estimand=f"rcece[k={j + 1}]",
                point=point,
                ci_lower=iv.lower,
                ci_upper=iv.upper,
                level=level,
                scale=SCALE_RATIO,
                method=inference.LOG_DELTA_INCIDENCE_RATIO,
                warnings=iv.warnings,
            )
        )
    return out


def absolute_cece_bounds_curve(
    incidences: IncidenceSeries, level: float = 0.95
) -> list[BoundsEstimate | None]:
    """Per-interval sharp bounds on the absolute effect among the exposed."""
    z = inference.normal_quantile(0.5 * (1.0 + level))
    ratios = relative_cece_curve(incidences, level)
    out: list[BoundsEstimate | None] = []
    for j, ratio in enumerate(ratios):
        if ratio is None:
            out.append(None)
            continue
        mu0 = float(incidences.incidence[0, j])
        mu1 = float(incidences.incidence[1, j])
        swapped = mu0 < mu1
        if swapped:
            mu0, mu1 = mu1, mu0
            v0 = float(incidences.variance[1, j])
            v1 = float(incidences.variance[0, j])
            r_point, r_lo, r_hi = 1.0 / ratio.point if ratio.point > 0 else math.inf, (
                1.0 / ratio.ci_upper if ratio.ci_upper > 0 else 0.0
            ), (1.0 / ratio.ci_lower if ratio.ci_lower > 0 else math.inf)
        else:
            v0 = float(incidences.variance[0, j])
            v1 = float(incidences.variance[1, j])
            r_point, r_lo, r_hi = ratio.point, ratio.ci_lower, ratio.ci_upper
        half = z * math.sqrt(v0 + v1)
        diff = mu0 - mu1
        lower = EstimateWithCI(
            estimand=f"acece_lower[k={j + 1}]",
            point=diff,
            ci_lower=diff - half,
            ci_upper=diff + half,
            level=level,
            scale=SCALE_DIFFERENCE,
            method=inference.WALD_DIFFERENCE,
        )
        upper = EstimateWithCI(
            estimand=f"acece_upper[k={j + 1}]",
            point=1.0 - r_point,
            ci_lower=1.0 - r_hi if math.isfinite(r_hi) else -math.inf,
            ci_upper=1.0 - r_lo,
            level=level,
            scale=SCALE_FRACTION,
            method=inference.LOG_DELTA_INCIDENCE_RATIO,
            warnings=ratio.warnings,
        )
        out.append(BoundsEstimate(lower=lower, upper=upper, orientation_swapped=swapped))
    return out
