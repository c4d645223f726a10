"""Discrete-time hazards, product-limit incidence, and effect curves."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cece import survival
from cece.data import DiscreteEventTable
from cece.errors import EstimationError


def make_table(at_risk, censored, events):
    return DiscreteEventTable(
        at_risk=np.array(at_risk), censored=np.array(censored),
        events=np.array(events),
    )


def hand_table():
    # arm 0: n=100; arm 1: n=120. K=3 with mixed censoring.
    return make_table(
        at_risk=[[100, 85, 70], [120, 110, 100]],
        censored=[[5, 5, 10], [4, 6, 8]],
        events=[[10, 10, 5], [6, 4, 2]],
    )


class TestHazards:
    def test_hand_computed(self):
        h = survival.discrete_hazards(hand_table())
        assert h.hazard[0].tolist() == pytest.approx([10 / 95, 10 / 80, 5 / 60])
        assert h.hazard[1].tolist() == pytest.approx([6 / 116, 4 / 104, 2 / 92])
        assert h.defined.all()

    def test_empty_risk_set_flagged(self):
        t = make_table(
            at_risk=[[10, 0, 0], [10, 8, 8]],
            censored=[[2, 0, 0], [0, 0, 8]],
            events=[[8, 0, 0], [2, 0, 0]],
        )
        h = survival.discrete_hazards(t)
        assert not h.defined[0, 1]
        assert math.isnan(h.hazard[0, 1])
        assert not h.defined[1, 2]  # everyone censored that interval


class TestCumulativeIncidence:
    def test_product_limit_exact_fractions(self):
        """Cross-check the float product-limit against exact rationals."""
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        surv = Fraction(1)
        for h in (Fraction(10, 95), Fraction(10, 80), Fraction(5, 60)):
            surv *= 1 - h
        assert inc.incidence[0, 2] == pytest.approx(float(1 - surv), abs=1e-15)

    def test_monotone_nondecreasing(self):
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        for a in (0, 1):
            assert all(np.diff(inc.incidence[a]) >= -1e-15)

    def test_no_censoring_equals_raw_fraction_and_binomial_variance(self):
        # 40 events out of 200 spread over 3 intervals, nobody censored.
        t = make_table(
            at_risk=[[200, 180, 170], [200, 195, 190]],
            censored=[[0, 0, 0], [0, 0, 0]],
            events=[[20, 10, 10], [5, 5, 10]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        assert inc.incidence[0, 2] == pytest.approx(40 / 200, abs=1e-15)
        assert inc.incidence[1, 2] == pytest.approx(20 / 200, abs=1e-15)
        # Greenwood collapses to the binomial variance of the raw fraction.
        for a, p in ((0, 0.2), (1, 0.1)):
            assert inc.variance[a, 2] == pytest.approx(p * (1 - p) / 200, rel=1e-12)

    def test_stops_at_first_empty_risk_set(self):
        t = make_table(
            at_risk=[[10, 0, 0], [10, 8, 6]],
            censored=[[2, 0, 0], [0, 0, 0]],
            events=[[8, 0, 0], [2, 2, 1]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        assert inc.valid_through == (1, 3)
        assert math.isnan(inc.incidence[0, 1])

    def test_certain_event_interval(self):
        t = make_table(
            at_risk=[[10, 0], [10, 5]],
            censored=[[0, 0], [0, 0]],
            events=[[10, 0], [5, 1]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        assert inc.incidence[0, 0] == pytest.approx(1.0)
        assert inc.variance[0, 0] == 0.0


class TestIncidenceAt:
    def test_lookup(self):
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        assert survival.incidence_at(inc, 0, 1) == pytest.approx(10 / 95)

    def test_bounds_checked(self):
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        with pytest.raises(EstimationError):
            survival.incidence_at(inc, 0, 0)
        with pytest.raises(EstimationError):
            survival.incidence_at(inc, 0, 4)

    def test_unidentified_horizon_rejected(self):
        t = make_table(
            at_risk=[[10, 0], [10, 8]],
            censored=[[2, 0], [0, 0]],
            events=[[8, 0], [2, 1]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        with pytest.raises(EstimationError, match="empty risk set"):
            survival.incidence_at(inc, 0, 2)


class TestEffectCurves:
    def test_ratio_curve_points(self):
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        curve = survival.relative_cece_curve(inc)
        for k, est in enumerate(curve):
            assert est is not None
            expected = inc.incidence[1, k] / inc.incidence[0, k]
            assert est.point == pytest.approx(expected)
            assert est.ci_lower <= est.point <= est.ci_upper

    def test_truncation_past_horizon(self):
        t = make_table(
            at_risk=[[10, 0], [10, 8]],
            censored=[[2, 0], [0, 0]],
            events=[[8, 0], [2, 1]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        curve = survival.relative_cece_curve(inc)
        assert curve[0] is not None and curve[1] is None

    def test_zero_numerator_entry(self):
        t = make_table(
            at_risk=[[50, 40], [50, 50]],
            censored=[[0, 0], [0, 0]],
            events=[[10, 5], [0, 10]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        curve = survival.relative_cece_curve(inc)
        assert curve[0].point == 0.0
        assert curve[0].ci_upper == math.inf

    def test_bounds_curve_matches_point_formulas(self):
        inc = survival.cumulative_incidence(survival.discrete_hazards(hand_table()))
        bounds = survival.absolute_cece_bounds_curve(inc)
        for k, b in enumerate(bounds):
            mu0, mu1 = inc.incidence[0, k], inc.incidence[1, k]
            hi, lo = max(mu0, mu1), min(mu0, mu1)
            assert b.lower.point == pytest.approx(hi - lo)
            assert b.upper.point == pytest.approx(1 - lo / hi)
            assert b.lower.point <= b.upper.point + 1e-15
            assert b.orientation_swapped == (mu0 < mu1)

    def test_bounds_curve_swaps_per_interval(self):
        t = make_table(
            at_risk=[[100, 90], [100, 70]],
            censored=[[0, 0], [0, 0]],
            events=[[10, 5], [30, 10]],
        )
        inc = survival.cumulative_incidence(survival.discrete_hazards(t))
        bounds = survival.absolute_cece_bounds_curve(inc)
        assert bounds[0].orientation_swapped  # mu1 = 0.3 > mu0 = 0.1
        assert bounds[1].orientation_swapped


@st.composite
def random_event_tables(draw):
    k = draw(st.integers(1, 6))
    at_risk = np.zeros((2, k), dtype=np.int64)
    censored = np.zeros((2, k), dtype=np.int64)
    events = np.zeros((2, k), dtype=np.int64)
    for a in (0, 1):
        n = draw(st.integers(5, 200))
        for j in range(k):
            at_risk[a, j] = n
            c = draw(st.integers(0, n))
            e = draw(st.integers(0, n - c))
            censored[a, j], events[a, j] = c, e
            n -= c + e
    return DiscreteEventTable(at_risk=at_risk, censored=censored, events=events)


class TestProperties:
    @given(random_event_tables())
    def test_incidence_stays_in_unit_interval(self, table):
        inc = survival.cumulative_incidence(survival.discrete_hazards(table))
        for a in (0, 1):
            valid = inc.incidence[a, : inc.valid_through[a]]
            assert ((valid >= -1e-15) & (valid <= 1 + 1e-15)).all()
            assert all(np.diff(valid) >= -1e-15)

    @given(random_event_tables())
    def test_hazards_in_unit_interval(self, table):
        h = survival.discrete_hazards(table)
        vals = h.hazard[h.defined]
        assert ((vals >= 0) & (vals <= 1)).all()

    @given(random_event_tables())
    def test_variance_nonnegative_where_defined(self, table):
        inc = survival.cumulative_incidence(survival.discrete_hazards(table))
        for a in (0, 1):
            v = inc.variance[a, : inc.valid_through[a]]
            assert (v[np.isfinite(v)] >= 0).all()
