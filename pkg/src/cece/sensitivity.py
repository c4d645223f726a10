"""Sensitivity analysis: point identification of the absolute effect.

One external parameter pins down the absolute effect among the exposed: the
control-arm outcome risk given exposure, or the control-arm exposure risk.
The two parameterizations are dual through the exposure-necessity identity
P(Y=1 | E=1, A=0) * P(E=1 | A=0) = P(Y=1 | A=0), so each implies the other,
and a sweep over the exposure-risk axis traces the full identified curve
between the sharp bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import inference
from .data import MODE_BINARY, ArmSummary
from .errors import EstimationError

_DUALITY_TOL = 1e-12


@dataclass(frozen=True)
class SensitivityPoint:
    p_exposure: float  # P(E=1 | A=0)
    p_outcome_given_exposure: float  # P(Y=1 | E=1, A=0)
    acece: float
    ci_lower: float | None = None
    ci_upper: float | None = None
    level: float | None = None


@dataclass(frozen=True)
class SensitivityCurve:
    points: tuple[SensitivityPoint, ...]
    source_summary: ArmSummary
    orientation_swapped: bool = False


def _oriented(summary: ArmSummary) -> tuple[ArmSummary, bool]:
    if summary.mode != MODE_BINARY:
        raise EstimationError("sensitivity analysis requires binary-point mode")
    if summary.mean_outcome[0] < summary.mean_outcome[1]:
        return (
            replace(
                summary,
                n=summary.n[::-1],
                mean_outcome=summary.mean_outcome[::-1],
                var_outcome=summary.var_outcome[::-1],
            ),
            True,
        )
    return summary, False


def _check_feasible(value: float, mu0: float, name: str) -> None:
    if value < mu0 - _DUALITY_TOL:
        raise EstimationError(
            f"infeasible {name}={value}: must be >= the control-arm mean {mu0} "
            "(otherwise the exposure-necessity identity is contradicted)"
        )
    if value > 1.0 + _DUALITY_TOL:
        raise EstimationError(f"infeasible {name}={value}: probabilities cannot exceed 1")


def _delta_ci(
    summary: ArmSummary, acece: float, grad0: float, grad1: float, level: float
) -> tuple[float, float]:
    # Sampling error in the arm means only; the sensitivity parameter is fixed.
    n0, n1 = summary.n
    v0, v1 = summary.var_outcome
    se = math.sqrt(grad0**2 * v0 / n0 + grad1**2 * v1 / n1)
    half = inference.normal_quantile(0.5 * (1.0 + level)) * se
    return acece - half, acece + half


def acece_from_outcome_risk(
    summary: ArmSummary,
    p_y_given_e: float,
    level: float | None = None,
) -> SensitivityPoint:
    """Absolute effect among the exposed given P(Y=1 | E=1, A=0).

    ``level`` is optional; when given, a delta-method interval propagating
    only the sampling error of the arm means is attached.
    """
    summary, _ = _oriented(summary)
    mu0, mu1 = summary.mean_outcome[0], summary.mean_outcome[1]
    if mu0 <= 0.0:
        raise EstimationError("zero control-arm mean: sensitivity analysis undefined")
    _check_feasible(p_y_given_e, mu0, "p_outcome_given_exposure")
    ratio = mu1 / mu0
    acece = p_y_given_e * (1.0 - ratio)
    point = SensitivityPoint(
        p_exposure=mu0 / p_y_given_e,
        p_outcome_given_exposure=p_y_given_e,
        acece=acece,
    )
    if level is not None:
        lo, hi = _delta_ci(
            summary,
            acece,
            grad0=p_y_given_e * mu1 / mu0**2,
            grad1=-p_y_given_e / mu0,
            level=level,
        )
        point = replace(point, ci_lower=lo, ci_upper=hi, level=level)
    return point


def acece_from_exposure_risk(
    summary: ArmSummary,
    p_e: float,
    level: float | None = None,
) -> SensitivityPoint:
    """Absolute effect among the exposed given P(E=1 | A=0).

    Under no effect of treatment on exposure, the same exposure risk applies
    to both arms, so the effect is the scaled mean difference
    (mu0 - mu1) / p_e.
    """
    summary, _ = _oriented(summary)
    mu0, mu1 = summary.mean_outcome[0], summary.mean_outcome[1]
    if mu0 <= 0.0:
        raise EstimationError("zero control-arm mean: sensitivity analysis undefined")
    _check_feasible(p_e, mu0, "p_exposure")
    acece = mu0 / p_e - mu1 / p_e
    point = SensitivityPoint(
        p_exposure=p_e,
        p_outcome_given_exposure=mu0 / p_e,
        acece=acece,
    )
    if level is not None:
        lo, hi = _delta_ci(
            summary, acece, grad0=1.0 / p_e, grad1=-1.0 / p_e, level=level
        )
        point = replace(point, ci_lower=lo, ci_upper=hi, level=level)
    return point


def sensitivity_sweep(
    summary: ArmSummary, grid_size: int, level: float | None = None
) -> SensitivityCurve:
    """Evaluate the identified effect over an even exposure-risk grid.

    The grid is linear in P(E=1 | A=0) on its feasible range [mu0, 1]; the
    endpoints reproduce the sharp upper and lower bounds respectively.
    """
    if grid_size < 2:
        raise EstimationError(f"grid_size must be >= 2, got {grid_size}")
    oriented, swapped = _oriented(summary)
    mu0 = oriented.mean_outcome[0]
    if mu0 <= 0.0:
        raise EstimationError("zero control-arm mean: sensitivity analysis undefined")
    step = (1.0 - mu0) / (grid_size - 1)
    points = tuple(
        acece_from_exposure_risk(oriented, mu0 + i * step, level=level)
        for i in range(grid_size)
    )
    return SensitivityCurve(
        points=points, source_summary=summary, orientation_swapped=swapped
    )
