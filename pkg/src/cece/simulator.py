"""Counterfactual trial simulator with brute-force effect oracles.

The simulator draws every potential-outcome column explicitly (exposure and
outcome under each treatment assignment, plus outcomes under forced
exposure), then projects the observed data by consistency: a subject assigned
arm a reveals exactly their a-indexed columns.  Oracles compute causal
quantities by direct averaging over the counterfactual columns, giving an
independent check of every identification formula.

Assumption knobs are orthogonal:

* supplying arm-invariant exposure probabilities encodes "treatment does not
  affect exposure"; arm-specific values violate it;
* ``necessity=True`` forces outcomes to zero without exposure; leak
  probabilities > 0 (with ``necessity=False``) violate it;
* in the longitudinal block, ``censor_exposure_multiplier != 1`` makes
  censoring depend on accumulated exposure, violating independent censoring.

All randomness is counter-based: one stream per (seed, draw-role), one value
per subject index, so generation order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import rng
from .data import (
    MODE_BINARY,
    MODE_TTE,
    ArmSummary,
    DiscreteEventTable,
    SubjectRecord,
    SubjectTable,
)
from .errors import InputError

# Draw-role slots for the counter-based generator.
SLOT_COVARIATE = 0
SLOT_TREATMENT = 1
SLOT_EXPOSURE = 2
SLOT_OUTCOME = 3
SLOT_LEAK = 4
SLOT_MISCLASSIFY = 5
_SLOT_LONGITUDINAL_BASE = 8  # + 3*(k-1) + {0: censor, 1: exposure, 2: outcome}


def _check_prob(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise InputError(f"{name} must be a probability in [0, 1], got {value}")


@dataclass(frozen=True)
class LongitudinalBlock:
    """Per-interval hazards for the time-to-event simulator.

    ``exposure_hazard`` applies to the control arm; ``exposure_hazard_treated``
    defaults to the same values (no effect on exposure) and may be set
    differently to violate that assumption.  ``censor_exposure_multiplier``
    scales the censoring hazard for already-exposed, event-free subjects;
    any value other than 1 violates independent censoring.
    """

    interval_count: int
    exposure_hazard: tuple[float, ...]
    outcome_hazard: tuple[tuple[float, ...], tuple[float, ...]]  # [arm][interval]
    censor_hazard: tuple[tuple[float, ...], tuple[float, ...]]  # [arm][interval]
    exposure_hazard_treated: tuple[float, ...] | None = None
    censor_exposure_multiplier: float = 1.0

    def __post_init__(self):
        k = self.interval_count
        if k < 1:
            raise InputError(f"interval_count must be >= 1, got {k}")
        series = [("exposure_hazard", self.exposure_hazard)]
        if self.exposure_hazard_treated is not None:
            series.append(("exposure_hazard_treated", self.exposure_hazard_treated))
        for a in (0, 1):
            series.append((f"outcome_hazard[{a}]", self.outcome_hazard[a]))
            series.append((f"censor_hazard[{a}]", self.censor_hazard[a]))
        for name, values in series:
            if len(values) != k:
                raise InputError(f"{name} must have length K={k}")
            for v in values:
                _check_prob(v, name)
        if self.censor_exposure_multiplier < 0:
            raise InputError("censor_exposure_multiplier must be >= 0")

    @property
    def no_effect_on_exposure(self) -> bool:
        return (
            self.exposure_hazard_treated is None
            or tuple(self.exposure_hazard_treated) == tuple(self.exposure_hazard)
        )

    def exposure_hazard_for(self, arm: int) -> tuple[float, ...]:
        if arm == 1 and self.exposure_hazard_treated is not None:
            return self.exposure_hazard_treated
        return self.exposure_hazard


@dataclass(frozen=True)
class SimulationConfig:
    """Declarative counterfactual data-generating process.

    ``exposure_prob[a][l]`` is P(exposed | L=l) under assignment a;
    ``outcome_prob[a][l]`` is P(outcome | exposed, L=l) under assignment a;
    ``leak_prob[a][l]`` is P(outcome | unexposed, L=l), forced to zero when
    ``necessity`` is on.
    """

    n: int
    seed: int
    treat_prob: float = 0.5
    covariate_levels: tuple[str, ...] = ("0",)
    covariate_probs: tuple[float, ...] = (1.0,)
    exposure_prob: tuple[tuple[float, ...], tuple[float, ...]] = ((1.0,), (1.0,))
    outcome_prob: tuple[tuple[float, ...], tuple[float, ...]] = ((0.0,), (0.0,))
    leak_prob: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    necessity: bool = True
    longitudinal: LongitudinalBlock | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"cohort size must be >= 1, got {self.n}")
        _check_prob(self.treat_prob, "treat_prob")
        m = len(self.covariate_levels)
        if len(self.covariate_probs) != m:
            raise InputError("covariate_levels and covariate_probs must align")
        for p in self.covariate_probs:
            _check_prob(p, "covariate_probs")
        if abs(sum(self.covariate_probs) - 1.0) > 1e-9:
            raise InputError("covariate_probs must sum to 1")
        for name, model in (("exposure_prob", self.exposure_prob),
                            ("outcome_prob", self.outcome_prob)):
            for a in (0, 1):
                if len(model[a]) != m:
                    raise InputError(f"{name}[{a}] must have one entry per stratum")
                for p in model[a]:
                    _check_prob(p, name)
        if self.leak_prob is not None:
            for a in (0, 1):
                if len(self.leak_prob[a]) != m:
                    raise InputError("leak_prob must have one entry per stratum")
                for p in self.leak_prob[a]:
                    _check_prob(p, "leak_prob")
            if self.necessity and any(p > 0 for a in (0, 1) for p in self.leak_prob[a]):
                raise InputError(
                    "necessity=True forbids nonzero leak probabilities; "
                    "set necessity=False to violate exposure necessity"
                )

    @property
    def no_effect_on_exposure(self) -> bool:
        return tuple(self.exposure_prob[0]) == tuple(self.exposure_prob[1])

    def leak(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        if self.leak_prob is None or self.necessity:
            m = len(self.covariate_levels)
            return ((0.0,) * m, (0.0,) * m)
        return self.leak_prob


def config_from_dict(raw: Mapping) -> SimulationConfig:
    """Build a config from a parsed key-value document (YAML/JSON)."""
    data = dict(raw)
    longitudinal = None
    if data.get("longitudinal") is not None:
        block = dict(data["longitudinal"])
        longitudinal = LongitudinalBlock(
            interval_count=int(block["interval_count"]),
            exposure_hazard=tuple(block["exposure_hazard"]),
            outcome_hazard=tuple(tuple(x) for x in block["outcome_hazard"]),
            censor_hazard=tuple(tuple(x) for x in block["censor_hazard"]),
            exposure_hazard_treated=(
                tuple(block["exposure_hazard_treated"])
                if block.get("exposure_hazard_treated") is not None
                else None
            ),
            censor_exposure_multiplier=float(
                block.get("censor_exposure_multiplier", 1.0)
            ),
        )
    return SimulationConfig(
        n=int(data["n"]),
        seed=int(data.get("seed", 0)),
        treat_prob=float(data.get("treat_prob", 0.5)),
        covariate_levels=tuple(str(c) for c in data.get("covariate_levels", ["0"])),
        covariate_probs=tuple(data.get("covariate_probs", [1.0])),
        exposure_prob=tuple(tuple(x) for x in data.get("exposure_prob", [[1.0], [1.0]])),
        outcome_prob=tuple(tuple(x) for x in data.get("outcome_prob", [[0.0], [0.0]])),
        leak_prob=(
            tuple(tuple(x) for x in data["leak_prob"])
            if data.get("leak_prob") is not None
            else None
        ),
        necessity=bool(data.get("necessity", True)),
        longitudinal=longitudinal,
    )


@dataclass(frozen=True)
class CounterfactualTable:
    """Full potential-outcome columns plus the observed projection.

    Point columns: ``e0/e1`` are exposures under each assignment, ``y0/y1``
    the corresponding outcomes, and ``y0_forced/y1_forced`` outcomes under a
    joint intervention forcing exposure.  Longitudinal tables additionally
    carry absorbing per-interval exposure/outcome paths per arm (uncensored
    counterfactual world) and the observed censoring interval.
    """

    config: SimulationConfig
    stratum_index: np.ndarray  # (n,)
    arm: np.ndarray  # (n,)
    e0: np.ndarray
    e1: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    y0_forced: np.ndarray
    y1_forced: np.ndarray
    exposure_path: np.ndarray | None = None  # (2, n, K)
    outcome_path: np.ndarray | None = None  # (2, n, K)
    censor_interval: np.ndarray | None = None  # (n,), 0 = never censored
    event_interval: np.ndarray | None = None  # observed, 0 = none

    @property
    def n(self) -> int:
        return self.arm.shape[0]

    @property
    def is_longitudinal(self) -> bool:
        return self.exposure_path is not None

    # Observed columns by consistency: arm a reveals the a-indexed columns.
    @property
    def exposure_observed(self) -> np.ndarray:
        return np.where(self.arm == 1, self.e1, self.e0)

    @property
    def outcome_observed(self) -> np.ndarray:
        return np.where(self.arm == 1, self.y1, self.y0)

    def observed_table(self) -> SubjectTable:
        """Project to a validated observed-data SubjectTable."""
        levels = self.config.covariate_levels
        with_strata = len(levels) > 1
        records = []
        if not self.is_longitudinal:
            e_obs = self.exposure_observed
            y_obs = self.outcome_observed
            for i in range(self.n):
                records.append(
                    SubjectRecord(
                        id=str(i),
                        arm=int(self.arm[i]),
                        outcome=float(y_obs[i]),
                        strata=((levels[self.stratum_index[i]],) if with_strata else None),
                        exposure=int(e_obs[i]),
                    )
                )
            flags = {"exposure"} | ({"strata"} if with_strata else set())
            return SubjectTable(
                records=tuple(records), mode=MODE_BINARY, schema_flags=frozenset(flags)
            )
        k = self.config.longitudinal.interval_count
        for i in range(self.n):
            ev = int(self.event_interval[i])
            ce = int(self.censor_interval[i])
            records.append(
                SubjectRecord(
                    id=str(i),
                    arm=int(self.arm[i]),
                    strata=((levels[self.stratum_index[i]],) if with_strata else None),
                    event_interval=ev if ev > 0 else None,
                    censor_interval=ce if ce > 0 else None,
                )
            )
        flags = {"strata"} if with_strata else set()
        return SubjectTable(
            records=tuple(records),
            mode=MODE_TTE,
            interval_count=k,
            schema_flags=frozenset(flags),
        )

    def observed_summary(self) -> ArmSummary:
        """Vectorized ArmSummary of the observed point projection."""
        if self.is_longitudinal:
            raise InputError("observed_summary applies to point-mode tables")
        y = self.outcome_observed.astype(np.float64)
        a = self.arm
        n = (int(np.sum(a == 0)), int(np.sum(a == 1)))
        if n[0] == 0 or n[1] == 0:
            from .errors import PositivityError

            label = "control" if n[0] == 0 else "vaccine"
            raise PositivityError(f"positivity violated: no {label} subjects")
        means = (float(y[a == 0].mean()), float(y[a == 1].mean()))
        variances = (float(y[a == 0].var()), float(y[a == 1].var()))
        levels = self.config.covariate_levels
        strata = n_by = mean_by = var_by = weights = None
        if len(levels) > 1:
            strata = tuple(sorted(levels))
            n_by, mean_by, var_by, weights = {}, {}, {}, {}
            for idx, code in enumerate(levels):
                mask = self.stratum_index == idx
                cells = [mask & (a == arm) for arm in (0, 1)]
                n_by[code] = (int(cells[0].sum()), int(cells[1].sum()))
                mean_by[code] = tuple(
                    float(y[c].mean()) if c.any() else float("nan") for c in cells
                )
                var_by[code] = tuple(
                    float(y[c].var()) if c.any() else float("nan") for c in cells
                )
                weights[code] = float(mask.mean())
        return ArmSummary(
            n=n,
            mean_outcome=means,
            var_outcome=variances,
            mode=MODE_BINARY,
            strata=strata,
            n_by_stratum=n_by,
            mean_by_stratum=mean_by,
            var_by_stratum=var_by,
            stratum_weights=weights,
        )

    def observed_event_table(self) -> DiscreteEventTable:
        """Vectorized DiscreteEventTable of the observed survival projection."""
        if not self.is_longitudinal:
            raise InputError("observed_event_table requires a longitudinal table")
        k = self.config.longitudinal.interval_count
        censored = np.zeros((2, k), dtype=np.int64)
        events = np.zeros((2, k), dtype=np.int64)
        at_risk = np.zeros((2, k), dtype=np.int64)
        for a in (0, 1):
            mask = self.arm == a
            ce = self.censor_interval[mask]
            ev = self.event_interval[mask]
            censored[a] = np.bincount(ce, minlength=k + 1)[1 : k + 1]
            events[a] = np.bincount(ev, minlength=k + 1)[1 : k + 1]
            at_risk[a, 0] = int(mask.sum())
            for j in range(1, k):
                at_risk[a, j] = at_risk[a, j - 1] - censored[a, j - 1] - events[a, j - 1]
        return DiscreteEventTable(at_risk=at_risk, censored=censored, events=events)


def _draw_strata_and_arm(config: SimulationConfig) -> tuple[np.ndarray, np.ndarray]:
    n, seed = config.n, config.seed
    cum = np.cumsum(config.covariate_probs)
    cum[-1] = 1.0
    u_cov = rng.uniforms(seed, SLOT_COVARIATE, n)
    stratum = np.searchsorted(cum, u_cov, side="right").astype(np.int64)
    arm = (rng.uniforms(seed, SLOT_TREATMENT, n) < config.treat_prob).astype(np.int8)
    return stratum, arm


def simulate_point_trial(config: SimulationConfig) -> CounterfactualTable:
    """Draw a point-exposure counterfactual cohort.

    Treatment is assigned independently of all potential columns; exposure
    and outcome draws share one uniform across arms, so arm-invariant
    probabilities produce identical potential exposures (e0 == e1) row-exact.
    """
    if config.longitudinal is not None:
        raise InputError("config has a longitudinal block; use simulate_survival_trial")
    n, seed = config.n, config.seed
    stratum, arm = _draw_strata_and_arm(config)

    u_exp = rng.uniforms(seed, SLOT_EXPOSURE, n)
    u_out = rng.uniforms(seed, SLOT_OUTCOME, n)
    u_leak = rng.uniforms(seed, SLOT_LEAK, n)

    exp_p = np.asarray(config.exposure_prob, dtype=np.float64)  # (2, m)
    out_p = np.asarray(config.outcome_prob, dtype=np.float64)
    leak_p = np.asarray(config.leak(), dtype=np.float64)

    e = [(u_exp < exp_p[a][stratum]).astype(np.int8) for a in (0, 1)]
    y_forced = [(u_out < out_p[a][stratum]).astype(np.int8) for a in (0, 1)]
    y_leak = [(u_leak < leak_p[a][stratum]).astype(np.int8) for a in (0, 1)]
    y = [
        np.where(e[a] == 1, y_forced[a], y_leak[a]).astype(np.int8)
        for a in (0, 1)
    ]
    return CounterfactualTable(
        config=config,
        stratum_index=stratum,
        arm=arm,
        e0=e[0],
        e1=e[1],
        y0=y[0],
        y1=y[1],
        y0_forced=y_forced[0],
        y1_forced=y_forced[1],
    )


def simulate_survival_trial(config: SimulationConfig) -> CounterfactualTable:
    """Draw a longitudinal counterfactual cohort with observed censoring.

    Within each interval the order is (censoring, exposure, outcome):
    censoring at k is decided from the state at the end of k-1 and removes
    the subject before this interval's exposure and outcome can be observed.
    Counterfactual uncensored paths are generated for both arms from shared
    uniforms; the observed projection truncates the assigned arm's path at
    the censoring interval.
    """
    block = config.longitudinal
    if block is None:
        raise InputError("config lacks a longitudinal block")
    n, seed, k = config.n, config.seed, block.interval_count
    stratum, arm = _draw_strata_and_arm(config)

    exposure_path = np.zeros((2, n, k), dtype=np.int8)
    outcome_path = np.zeros((2, n, k), dtype=np.int8)
    censor_interval = np.zeros(n, dtype=np.int64)
    event_interval = np.zeros(n, dtype=np.int64)

    e_prev = np.zeros((2, n), dtype=bool)
    y_prev = np.zeros((2, n), dtype=bool)
    obs_censored = np.zeros(n, dtype=bool)
    obs_event = np.zeros(n, dtype=bool)
    e_obs_prev = np.zeros(n, dtype=bool)

    ch = np.asarray(block.censor_hazard, dtype=np.float64)  # (2, K)
    mult = block.censor_exposure_multiplier

    for j in range(k):
        base = _SLOT_LONGITUDINAL_BASE + 3 * j
        u_c = rng.uniforms(seed, base, n)
        u_e = rng.uniforms(seed, base + 1, n)
        u_y = rng.uniforms(seed, base + 2, n)

        # Observed censoring first (C before E and Y within the interval).
        hazard = ch[arm, j]
        if mult != 1.0:
            hazard = np.where(e_obs_prev, np.minimum(hazard * mult, 1.0), hazard)
        alive = ~obs_censored & ~obs_event
        newly_censored = alive & (u_c < hazard)
        censor_interval[newly_censored] = j + 1
        obs_censored |= newly_censored

        # Counterfactual uncensored paths for both arms.
        for a in (0, 1):
            eh = block.exposure_hazard_for(a)[j]
            oh = block.outcome_hazard[a][j]
            e_now = e_prev[a] | (~e_prev[a] & (u_e < eh))
            y_now = y_prev[a] | (~y_prev[a] & e_now & (u_y < oh))
            exposure_path[a, :, j] = e_now
            outcome_path[a, :, j] = y_now
            e_prev[a] = e_now
            y_prev[a] = y_now

        # Observed events: the assigned arm's counterfactual event surfaces
        # only for subjects still under follow-up.
        y_now_obs = outcome_path[arm, np.arange(n), j].astype(bool)
        new_event = y_now_obs & ~obs_censored & ~obs_event
        event_interval[new_event] = j + 1
        obs_event |= new_event
        e_obs_prev = exposure_path[arm, np.arange(n), j].astype(bool)

    return CounterfactualTable(
        config=config,
        stratum_index=stratum,
        arm=arm,
        e0=exposure_path[0, :, k - 1],
        e1=exposure_path[1, :, k - 1],
        y0=outcome_path[0, :, k - 1],
        y1=outcome_path[1, :, k - 1],
        y0_forced=outcome_path[0, :, k - 1],
        y1_forced=outcome_path[1, :, k - 1],
        exposure_path=exposure_path,
        outcome_path=outcome_path,
        censor_interval=censor_interval,
        event_interval=event_interval,
    )


@dataclass(frozen=True)
class OracleValue:
    """A brute-force causal quantity with its Monte-Carlo standard error.

    ``empty`` marks conditioning sets with no members (the value is then
    None, never NaN).
    """

    value: float | None
    se: float
    n: int
    empty: bool = False


def _mean_value(x: np.ndarray) -> OracleValue:
    n = x.size
    if n == 0:
        return OracleValue(value=None, se=float("inf"), n=0, empty=True)
    mean = float(np.mean(x))
    se = float(np.sqrt(np.var(x) / n)) if n > 1 else float("inf")
    return OracleValue(value=mean, se=se, n=n)


def _difference(a: OracleValue, b: OracleValue) -> OracleValue:
    if a.empty or b.empty:
        return OracleValue(value=None, se=float("inf"), n=min(a.n, b.n), empty=True)
    return OracleValue(
        value=a.value - b.value,
        se=float(np.hypot(a.se, b.se)),
        n=min(a.n, b.n),
    )


def _ratio(num: OracleValue, den: OracleValue) -> OracleValue:
    if num.empty or den.empty:
        return OracleValue(value=None, se=float("inf"), n=min(num.n, den.n), empty=True)
    if den.value == 0.0:
        return OracleValue(value=None, se=float("inf"), n=min(num.n, den.n), empty=True)
    r = num.value / den.value
    if num.value == 0.0:
        se = num.se / den.value
    else:
        se = abs(r) * float(
            np.sqrt((num.se / num.value) ** 2 + (den.se / den.value) ** 2)
        )
    return OracleValue(value=r, se=se, n=min(num.n, den.n))


@dataclass(frozen=True)
class OraclePointReport:
    """Direct-averaging causal quantities from the counterfactual columns."""

    ate: OracleValue
    relative_ate: OracleValue
    relative_cece: OracleValue
    absolute_cece: OracleValue
    relative_pse: OracleValue
    absolute_pse: OracleValue
    naive_contrast_ratio: OracleValue
    naive_contrast_difference: OracleValue
    relative_cde_by_stratum: Mapping[str, OracleValue]
    absolute_cde_by_stratum: Mapping[str, OracleValue]
    marginal_relative_cde: OracleValue
    marginal_absolute_cde: OracleValue


def oracle_point_effects(table: CounterfactualTable) -> OraclePointReport:
    """Compute every point-exposure estimand by brute force."""
    y0 = table.y0.astype(np.float64)
    y1 = table.y1.astype(np.float64)
    e_obs = table.exposure_observed.astype(bool)

    mean_y0 = _mean_value(y0)
    mean_y1 = _mean_value(y1)
    ate = _difference(mean_y1, mean_y0)
    relative_ate = _ratio(mean_y1, mean_y0)

    cece_1 = _mean_value(y1[e_obs])
    cece_0 = _mean_value(y0[e_obs])
    relative_cece = _ratio(cece_1, cece_0)
    absolute_cece = _difference(cece_0, cece_1)

    both = (table.e0 == 1) & (table.e1 == 1)
    pse_1 = _mean_value(y1[both])
    pse_0 = _mean_value(y0[both])
    relative_pse = _ratio(pse_1, pse_0)
    absolute_pse = _difference(pse_0, pse_1)

    naive_1 = _mean_value(y1[table.e1 == 1])
    naive_0 = _mean_value(y0[table.e0 == 1])
    naive_ratio = _ratio(naive_1, naive_0)
    naive_diff = _difference(naive_0, naive_1)

    yf0 = table.y0_forced.astype(np.float64)
    yf1 = table.y1_forced.astype(np.float64)
    rel_by_stratum: dict[str, OracleValue] = {}
    abs_by_stratum: dict[str, OracleValue] = {}
    for idx, code in enumerate(table.config.covariate_levels):
        mask = table.stratum_index == idx
        f1 = _mean_value(yf1[mask])
        f0 = _mean_value(yf0[mask])
        rel_by_stratum[code] = _ratio(f1, f0)
        abs_by_stratum[code] = _difference(f0, f1)
    marginal_rel = _ratio(_mean_value(yf1), _mean_value(yf0))
    marginal_abs = _difference(_mean_value(yf0), _mean_value(yf1))

    return OraclePointReport(
        ate=ate,
        relative_ate=relative_ate,
        relative_cece=relative_cece,
        absolute_cece=absolute_cece,
        relative_pse=relative_pse,
        absolute_pse=absolute_pse,
        naive_contrast_ratio=naive_ratio,
        naive_contrast_difference=naive_diff,
        relative_cde_by_stratum=rel_by_stratum,
        absolute_cde_by_stratum=abs_by_stratum,
        marginal_relative_cde=marginal_rel,
        marginal_absolute_cde=marginal_abs,
    )


@dataclass(frozen=True)
class OracleSurvivalReport:
    """Brute-force time-to-event effects at one horizon."""

    interval: int
    relative_cece: OracleValue
    absolute_cece: OracleValue
    incidence_control: OracleValue
    incidence_vaccine: OracleValue


def oracle_survival_effects(table: CounterfactualTable, k: int) -> OracleSurvivalReport:
    """Direct averaging of the uncensored counterfactual paths at horizon k."""
    if not table.is_longitudinal:
        raise InputError("oracle_survival_effects requires a longitudinal table")
    block = table.config.longitudinal
    if not 1 <= k <= block.interval_count:
        raise InputError(f"horizon {k} outside 1..{block.interval_count}")
    j = k - 1
    y0 = table.outcome_path[0, :, j].astype(np.float64)
    y1 = table.outcome_path[1, :, j].astype(np.float64)
    e0 = table.exposure_path[0, :, j] == 1
    e1 = table.exposure_path[1, :, j] == 1
    cond_1 = _mean_value(y1[e1])
    cond_0 = _mean_value(y0[e0])
    return OracleSurvivalReport(
        interval=k,
        relative_cece=_ratio(cond_1, cond_0),
        absolute_cece=_difference(cond_0, cond_1),
        incidence_control=_mean_value(y0),
        incidence_vaccine=_mean_value(y1),
    )


def misclassify_outcome(
    table: SubjectTable, sensitivity: float, seed: int = 0
) -> SubjectTable:
    """Flip observed outcomes 1 -> 0 independently with prob 1 - sensitivity.

    Zeros are never flipped (perfect specificity) and the flip probability is
    the same in both arms (non-differential).
    """
    if table.mode != MODE_BINARY:
        raise InputError("misclassify_outcome requires binary-point mode")
    if not 0.0 < sensitivity <= 1.0:
        raise InputError(f"sensitivity must be in (0, 1], got {sensitivity}")
    if sensitivity == 1.0:
        return table
    u = rng.uniforms(seed, SLOT_MISCLASSIFY, table.n)
    records = []
    for i, rec in enumerate(table.records):
        if rec.outcome == 1.0 and u[i] >= sensitivity:
            records.append(
                SubjectRecord(
                    id=rec.id,
                    arm=rec.arm,
                    outcome=0.0,
                    strata=rec.strata,
                    exposure=rec.exposure,
                    event_interval=rec.event_interval,
                    censor_interval=rec.censor_interval,
                )
            )
        else:
            records.append(rec)
    return SubjectTable(
        records=tuple(records),
        mode=table.mode,
        interval_count=table.interval_count,
        schema_flags=table.schema_flags,
    )
