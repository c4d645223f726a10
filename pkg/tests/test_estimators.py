"""Point-exposure estimators: identification formulas and their algebra."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cece import estimators
from cece.data import MODE_NONNEG, ArmSummary
from cece.errors import EstimationError, PositivityError

# Strategy for well-behaved binary aggregate summaries.
means = st.floats(min_value=0.001, max_value=0.999)
sizes = st.integers(min_value=10, max_value=100_000)


def aggregate(mu1, mu0, n1=1000, n0=1000):
    return ArmSummary.from_aggregates(mu1=mu1, mu0=mu0, n1=n1, n0=n0)


class TestRelativeCece:
    def test_point_is_ratio_of_means(self):
        est = estimators.estimate_relative_cece(aggregate(0.02, 0.08))
        assert est.point == pytest.approx(0.25)
        assert est.scale == "ratio"

    def test_zero_denominator_is_error(self):
        with pytest.raises(EstimationError, match="zero control-arm mean"):
            estimators.estimate_relative_cece(aggregate(0.1, 0.0))

    def test_zero_numerator_gives_half_open_interval(self):
        est = estimators.estimate_relative_cece(aggregate(0.0, 0.1))
        assert est.point == 0.0
        assert est.ci_lower == 0.0 and est.ci_upper == math.inf
        assert est.warnings

    def test_continuity_correction(self):
        est = estimators.estimate_relative_cece(
            aggregate(0.0, 0.1, n1=100, n0=100), continuity_correction=True
        )
        # 0.5 events / 101 subjects in the vaccine arm, 10.5/101 in control.
        assert est.point == pytest.approx((0.5 / 101) / (10.5 / 101))
        assert 0.0 < est.ci_lower < est.point < est.ci_upper < math.inf

    def test_correction_untouched_when_events_present(self):
        plain = estimators.estimate_relative_cece(aggregate(0.02, 0.08))
        corrected = estimators.estimate_relative_cece(
            aggregate(0.02, 0.08), continuity_correction=True
        )
        assert plain == corrected

    def test_nonneg_outcomes_supported(self):
        s = ArmSummary(
            n=(500, 500),
            mean_outcome=(4.0, 1.0),
            var_outcome=(2.0, 0.5),
            mode=MODE_NONNEG,
        )
        est = estimators.estimate_relative_cece(s)
        assert est.point == pytest.approx(0.25)

    def test_fieller_method_selectable(self):
        est = estimators.estimate_relative_cece(
            aggregate(0.02, 0.08), method="fieller-ratio"
        )
        assert est.method == "fieller-ratio"
        assert est.ci_lower <= est.point <= est.ci_upper


class TestBounds:
    def test_reference_values(self):
        b = estimators.bound_absolute_cece(aggregate(0.009, 0.031))
        assert b.lower.point == pytest.approx(0.022)
        assert b.upper.point == pytest.approx(1 - 0.009 / 0.031)
        assert not b.orientation_swapped

    def test_orientation_swap_recorded(self):
        b = estimators.bound_absolute_cece(aggregate(0.031, 0.009))
        assert b.orientation_swapped
        assert b.lower.point == pytest.approx(0.022)
        assert b.upper.point == pytest.approx(1 - 0.009 / 0.031)

    def test_binary_mode_required(self):
        s = ArmSummary(
            n=(10, 10), mean_outcome=(1.0, 2.0), var_outcome=(1.0, 1.0),
            mode=MODE_NONNEG,
        )
        with pytest.raises(EstimationError, match="binary"):
            estimators.bound_absolute_cece(s)

    @given(mu1=means, mu0=means, n1=sizes, n0=sizes)
    def test_lower_never_exceeds_upper(self, mu1, mu0, n1, n0):
        b = estimators.bound_absolute_cece(aggregate(mu1, mu0, n1, n0))
        assert b.lower.point <= b.upper.point + 1e-15

    @given(mu1=means, mu0=means)
    def test_upper_equals_excess_fraction(self, mu1, mu0):
        if mu1 > mu0:
            mu1, mu0 = mu0, mu1  # excess fraction is reported on orientation
        s = aggregate(mu1, mu0)
        b = estimators.bound_absolute_cece(s)
        ef = estimators.estimate_excess_fraction(s)
        assert b.upper.point == ef.point
        assert b.upper.ci_lower == ef.ci_lower
        assert b.upper.ci_upper == ef.ci_upper

    @given(mu1=means, mu0=means)
    def test_lower_is_negated_ate_under_orientation(self, mu1, mu0):
        if mu1 > mu0:
            mu1, mu0 = mu0, mu1
        s = aggregate(mu1, mu0)
        b = estimators.bound_absolute_cece(s)
        ate = estimators.estimate_ate(s)
        assert b.lower.point == -ate.point
        assert b.lower.ci_lower == pytest.approx(-ate.ci_upper, abs=1e-15)
        assert b.lower.ci_upper == pytest.approx(-ate.ci_lower, abs=1e-15)

    @given(mu1=means)
    def test_bounds_coincide_when_control_mean_is_one(self, mu1):
        b = estimators.bound_absolute_cece(aggregate(mu1, 1.0))
        assert b.lower.point == pytest.approx(b.upper.point, abs=1e-15)


class TestConditionalCde:
    def stratified_summary(self):
        return ArmSummary(
            n=(400, 400),
            mean_outcome=(0.2, 0.05),
            var_outcome=(0.16, 0.0475),
            mode="binary-point",
            strata=("a", "b"),
            n_by_stratum={"a": (200, 200), "b": (200, 200)},
            mean_by_stratum={"a": (0.3, 0.06), "b": (0.1, 0.04)},
            var_by_stratum={"a": (0.21, 0.0564), "b": (0.09, 0.0384)},
            stratum_weights={"a": 0.5, "b": 0.5},
        )

    def test_per_stratum_ratio(self):
        s = self.stratified_summary()
        est = estimators.estimate_conditional_cde(s, "a")
        assert est.point == pytest.approx(0.2)
        est = estimators.estimate_conditional_cde(s, "b")
        assert est.point == pytest.approx(0.4)

    def test_unknown_stratum(self):
        with pytest.raises(EstimationError, match="unknown stratum"):
            estimators.estimate_conditional_cde(self.stratified_summary(), "zz")

    def test_no_strata(self):
        with pytest.raises(EstimationError, match="no strata"):
            estimators.estimate_conditional_cde(aggregate(0.1, 0.2), "a")

    def test_empty_cell_is_positivity_error(self):
        s = self.stratified_summary()
        broken = ArmSummary(
            n=s.n, mean_outcome=s.mean_outcome, var_outcome=s.var_outcome,
            mode=s.mode, strata=s.strata,
            n_by_stratum={"a": (0, 200), "b": (200, 200)},
            mean_by_stratum=s.mean_by_stratum, var_by_stratum=s.var_by_stratum,
            stratum_weights=s.stratum_weights,
        )
        with pytest.raises(PositivityError):
            estimators.estimate_conditional_cde(broken, "a")


class TestMarginalCde:
    def test_requires_explicit_assumption(self):
        s = TestConditionalCde().stratified_summary()
        with pytest.raises(EstimationError, match="deterministic"):
            estimators.estimate_marginal_cde_deterministic(s)

    def test_weighted_formula(self):
        s = TestConditionalCde().stratified_summary()
        est = estimators.estimate_marginal_cde_deterministic(
            s, assume_deterministic=True
        )
        assert est.ratio.point == pytest.approx(0.5 * 0.2 + 0.5 * 0.4)
        assert est.absolute_ppe.point == pytest.approx(1 - 0.3)
        assert est.ratio.ci_lower <= est.ratio.point <= est.ratio.ci_upper


class TestExcessFraction:
    def test_complement_of_ratio(self):
        s = aggregate(0.009, 0.031)
        ratio = estimators.estimate_relative_cece(s)
        ef = estimators.estimate_excess_fraction(s)
        assert ef.point == pytest.approx(1 - ratio.point)
        assert ef.ci_lower == pytest.approx(1 - ratio.ci_upper)
        assert ef.ci_upper == pytest.approx(1 - ratio.ci_lower)

    def test_json_schema(self):
        est = estimators.estimate_relative_cece(aggregate(0.009, 0.031))
        d = est.to_json_dict(n_per_arm=(5829, 5807))
        assert set(d) == {
            "estimand", "point", "ci", "level", "method", "scale",
            "orientation_swapped", "n_per_arm",
        }
        assert d["ci"] == [est.ci_lower, est.ci_upper]
        assert d["n_per_arm"] == [5829, 5807]
