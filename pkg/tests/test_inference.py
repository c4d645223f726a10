"""Confidence interval machinery: quantiles, difference/ratio/Fieller CIs."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from cece import inference
from cece.errors import EstimationError
from cece.inference import (
    FIELLER_RATIO,
    LOG_DELTA_RATIO,
    IntervalMethod,
    difference_ci,
    difference_ci_from_variances,
    fieller_ratio_ci,
    incidence_ratio_ci,
    normal_quantile,
    ratio_ci,
    ratio_ci_from_variances,
)

Z95 = 1.959963984540054  # scipy.stats.norm.ppf(0.975)


class TestNormalQuantile:
    def test_matches_scipy_on_grid(self):
        for p in (1e-12, 1e-6, 0.001, 0.024, 0.025, 0.3, 0.5, 0.7, 0.975,
                  0.999, 1 - 1e-9):
            assert normal_quantile(p) == pytest.approx(
                stats.norm.ppf(p), abs=1e-13, rel=1e-13
            )

    def test_median_is_zero(self):
        assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-15)

    @given(st.floats(min_value=0.01, max_value=0.99))
    def test_symmetry(self, p):
        # 1 - p is exact only away from the tails; tail symmetry is covered
        # by the scipy grid comparison above.
        assert normal_quantile(p) == pytest.approx(-normal_quantile(1 - p), abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_out_of_range(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)


class TestDifferenceCI:
    def test_hand_computed_wald(self):
        # p1=0.2 (n=100), p0=0.1 (n=200): se = sqrt(.2*.8/100 + .1*.9/200)
        iv = difference_ci(0.2, 100, 0.1, 200, level=0.95)
        se = math.sqrt(0.2 * 0.8 / 100 + 0.1 * 0.9 / 200)
        assert iv.lower == pytest.approx(0.1 - Z95 * se, abs=1e-12)
        assert iv.upper == pytest.approx(0.1 + Z95 * se, abs=1e-12)

    def test_degenerate_proportion_warns(self):
        iv = difference_ci(0.0, 50, 0.3, 50)
        assert iv.warnings

    @given(
        p1=st.floats(0, 1),
        p0=st.floats(0, 1),
        n1=st.integers(1, 10_000),
        n0=st.integers(1, 10_000),
        level=st.floats(0.5, 0.999),
    )
    def test_contains_point(self, p1, p0, n1, n0, level):
        iv = difference_ci(p1, n1, p0, n0, level)
        assert iv.lower <= p1 - p0 <= iv.upper

    @given(
        p1=st.floats(0.01, 0.99),
        p0=st.floats(0.01, 0.99),
        n1=st.integers(2, 1000),
        n0=st.integers(2, 1000),
    )
    def test_nested_in_level(self, p1, p0, n1, n0):
        narrow = difference_ci(p1, n1, p0, n0, 0.8)
        wide = difference_ci(p1, n1, p0, n0, 0.99)
        assert wide.lower <= narrow.lower and narrow.upper <= wide.upper


class TestRatioCI:
    def test_hand_computed_log_delta(self):
        # r = 0.009/0.031; se_log = sqrt((1-p1)/(n1 p1) + (1-p0)/(n0 p0))
        iv = ratio_ci(0.009, 5807, 0.031, 5829)
        se_log = math.sqrt(
            (1 - 0.009) / (5807 * 0.009) + (1 - 0.031) / (5829 * 0.031)
        )
        r = 0.009 / 0.031
        assert iv.lower == pytest.approx(r * math.exp(-Z95 * se_log), rel=1e-12)
        assert iv.upper == pytest.approx(r * math.exp(Z95 * se_log), rel=1e-12)

    def test_zero_proportion_rejected(self):
        with pytest.raises(EstimationError):
            ratio_ci(0.0, 100, 0.2, 100)

    @given(
        p1=st.floats(0.001, 1),
        p0=st.floats(0.001, 1),
        n1=st.integers(1, 10_000),
        n0=st.integers(1, 10_000),
    )
    def test_contains_point(self, p1, p0, n1, n0):
        iv = ratio_ci(p1, n1, p0, n0)
        assert iv.lower <= p1 / p0 <= iv.upper

    def test_variance_form_consistent(self):
        p1, n1, p0, n0 = 0.12, 400, 0.2, 300
        a = ratio_ci(p1, n1, p0, n0)
        b = ratio_ci_from_variances(
            p1, p1 * (1 - p1) / n1, p0, p0 * (1 - p0) / n0
        )
        assert (a.lower, a.upper) == (b.lower, b.upper)


class TestFiellerCI:
    def test_close_to_log_delta_for_precise_data(self):
        p1, n1, p0, n0 = 0.1, 100_000, 0.25, 100_000
        fieller = ratio_ci(p1, n1, p0, n0, IntervalMethod(FIELLER_RATIO))
        delta = ratio_ci(p1, n1, p0, n0, IntervalMethod(LOG_DELTA_RATIO))
        assert fieller.lower == pytest.approx(delta.lower, rel=1e-3)
        assert fieller.upper == pytest.approx(delta.upper, rel=1e-3)

    def test_unbounded_when_denominator_spans_zero(self):
        iv = fieller_ratio_ci(0.5, 0.01, 0.05, 0.01)
        assert iv.unbounded
        assert iv.lower == -math.inf and iv.upper == math.inf

    @given(
        m1=st.floats(0.05, 1),
        m0=st.floats(0.05, 1),
        n=st.integers(1000, 100_000),
    )
    def test_contains_point_when_bounded(self, m1, m0, n):
        iv = fieller_ratio_ci(m1, m1 * (1 - m1) / n, m0, m0 * (1 - m0) / n)
        if not iv.unbounded:
            assert iv.lower - 1e-12 <= m1 / m0 <= iv.upper + 1e-12


class TestIncidenceRatioCI:
    def test_reduces_to_binomial_ratio_without_censoring(self):
        # With binomial variances the incidence-ratio CI is the plain
        # log-delta ratio CI.
        p1, n1, p0, n0 = 0.04, 2500, 0.1, 2500
        a = incidence_ratio_ci(
            p1, p1 * (1 - p1) / n1, p0, p0 * (1 - p0) / n0
        )
        b = ratio_ci(p1, n1, p0, n0)
        assert (a.lower, a.upper) == (b.lower, b.upper)

    def test_rejects_zero_incidence(self):
        with pytest.raises(EstimationError):
            incidence_ratio_ci(0.0, 0.0, 0.1, 0.001)

    def test_rejects_nonfinite_variance(self):
        with pytest.raises(EstimationError):
            incidence_ratio_ci(0.1, math.nan, 0.2, 0.001)


class TestDifferenceFromVariances:
    @given(
        m1=st.floats(-5, 5),
        m0=st.floats(-5, 5),
        v1=st.floats(0, 4),
        v0=st.floats(0, 4),
        n1=st.integers(1, 5000),
        n0=st.integers(1, 5000),
    )
    def test_symmetric_about_point(self, m1, m0, v1, v0, n1, n0):
        iv = difference_ci_from_variances(m1, v1, n1, m0, v0, n0)
        mid = 0.5 * (iv.lower + iv.upper)
        assert mid == pytest.approx(m1 - m0, abs=1e-9)
