"""Unit tests for poly_estimators.py - envelopes of x ln x."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_gegenbauer

from entbounds.core.coefficients import CHEB_MAX_DEGREE
from entbounds.core.errors import DegreeOutOfRange, DomainError, InvalidTag
from entbounds.core.poly_estimators import (
    G15_MAX_ERROR,
    G15_PEAK_REGION,
    EnvelopeTag,
    GridSpec,
    approximation_error,
    closed_form_second_derivative,
    envelope_slack,
    eval_cheb_lower,
    eval_cheb_upper,
    eval_f,
    eval_g,
    eval_g_second_derivative,
    eval_h,
    eval_lanczos,
    eval_taylor_lower_poly,
    eval_taylor_upper_poly,
    g_derivative_exact,
    g_endpoint_derivatives,
    g_second_derivative_coeffs,
    g_second_derivative_gegenbauer,
    g_third_derivative_at_one,
    gegenbauer_c2,
    parse_tag,
    validity_ranges,
    verify_envelope,
    xlogx,
)

ALL_CHEB = range(2, CHEB_MAX_DEGREE + 1)
SMALL_GRID = GridSpec(uniform=20_001, endpoint=2_001)


class TestEvaluators:
    """Pointwise values and shapes."""

    def test_xlogx(self):
        assert xlogx(0.0) == 0.0
        assert xlogx(1.0) == 0.0
        assert xlogx(0.5) == pytest.approx(0.5 * math.log(0.5))

    def test_scalar_in_scalar_out(self):
        assert isinstance(eval_g(5, 0.3), float)
        assert eval_g(5, np.array([0.1, 0.2])).shape == (2,)

    def test_gini_polynomial(self):
        """g_2(x) = x^2 - x = -f_2(x)"""
        assert eval_g(2, 0.5) == pytest.approx(-0.25, abs=1e-15)
        assert eval_f(2, 0.5) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 8, 15])
    def test_taylor_product_and_coefficient_forms_agree(self, n):
        x = np.linspace(0.0, 1.0, 101)
        np.testing.assert_allclose(
            eval_f(n, x), eval_taylor_lower_poly(n, x), atol=1e-9
        )
        np.testing.assert_allclose(
            eval_h(n, x), eval_taylor_upper_poly(n, x), atol=1e-9
        )

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_endpoints_vanish(self, n):
        for fn in (eval_f, eval_g, eval_cheb_lower, eval_cheb_upper):
            assert fn(n, 1.0) == pytest.approx(0.0, abs=1e-13)
        assert eval_g(n, 0.0) == pytest.approx(0.0, abs=1e-13)
        assert eval_f(n, 0.0) == 0.0

    def test_taylor_upper_at_zero(self):
        assert eval_h(4, 0.0) == pytest.approx(0.25)

    def test_cheb_lower_is_negated_g(self):
        x = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(eval_cheb_lower(7, x), -eval_g(7, x))

    @pytest.mark.parametrize("n", [2, 3, 4, 9])
    def test_lanczos_offset_at_zero(self, n):
        """The unmodified sum misses zero by (-1)^(n+1) / (2 n^2)"""
        expected = (-1) ** (n + 1) / (2 * n * n)
        assert eval_lanczos(n, 0.0) == pytest.approx(expected, abs=1e-14)
        assert eval_lanczos(n, 1.0) == pytest.approx(0.0, abs=1e-13)

    def test_g15_is_within_one_hundredth(self):
        """Measured peak is 3.44e-3 near x = 0.005, above 1e-3 / e"""
        x = np.linspace(0.0, 1.0, 100_001)
        err, where = approximation_error(15, x)
        assert err < G15_MAX_ERROR
        assert err > 1e-3 / math.e
        assert where < G15_PEAK_REGION

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_taylor_envelopes_tighten_with_degree(self, n):
        """f_{n+1} >= f_n and h_{n+1} <= h_n"""
        x = np.linspace(0.0, 1.0, 1001)
        assert np.all(eval_f(n + 1, x) >= eval_f(n, x) - 1e-15)
        assert np.all(eval_h(n + 1, x) <= eval_h(n, x) + 1e-15)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            eval_g(5, 1.5)
        with pytest.raises(DomainError):
            eval_f(5, np.array([0.2, -0.1]))

    def test_degree_errors(self):
        with pytest.raises(DegreeOutOfRange):
            eval_g(16, 0.5)
        with pytest.raises(DegreeOutOfRange):
            eval_f(1, 0.5)


class TestDerivatives:
    """Exact derivative data of g_n."""

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_endpoint_slopes_match_differentiation(self, n):
        at_zero, at_one = g_endpoint_derivatives(n)
        assert at_zero == g_derivative_exact(n, 1, 0)
        assert at_one == g_derivative_exact(n, 1, 1)

    def test_endpoint_slopes_values(self):
        assert g_endpoint_derivatives(2) == (Fraction(-1), Fraction(1))
        assert g_endpoint_derivatives(3)[1] == Fraction(8, 9)
        assert g_endpoint_derivatives(4)[1] == 1

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_closed_forms_match_termwise(self, n):
        assert closed_form_second_derivative(n) == (
            g_second_derivative_coeffs(n)
        )

    @pytest.mark.parametrize("n", range(2, CHEB_MAX_DEGREE + 1, 2))
    def test_third_derivative_at_one(self, n):
        assert g_third_derivative_at_one(n) == g_derivative_exact(n, 3, 1)

    def test_third_derivative_odd_rejected(self):
        with pytest.raises(DomainError):
            g_third_derivative_at_one(5)

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_gegenbauer_form(self, n):
        x = np.linspace(0.0, 1.0, 1001)
        np.testing.assert_allclose(
            g_second_derivative_gegenbauer(n, x),
            eval_g_second_derivative(n, x),
            atol=1e-9,
        )

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 14])
    def test_gegenbauer_recurrence(self, n):
        xi = np.linspace(-1.0, 1.0, 41)
        np.testing.assert_allclose(
            gegenbauer_c2(n, xi),
            eval_gegenbauer(n, 2.0, xi),
            rtol=1e-12,
            atol=1e-10,
        )

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_g_is_convex(self, n):
        x = np.linspace(0.0, 1.0, 1001)
        assert np.all(eval_g_second_derivative(n, x) >= -1e-8)

    def test_gegenbauer_negative_degree(self):
        assert gegenbauer_c2(-2, 0.3) == 0.0

    def test_second_derivative_of_gini(self):
        assert g_second_derivative_coeffs(2) == (Fraction(2),)


class TestEnvelopes:
    """Grid verification of the four inequalities."""

    @pytest.mark.parametrize("tag", list(EnvelopeTag))
    @pytest.mark.parametrize("n", [2, 3, 6, 11, 15])
    def test_envelope_holds(self, n, tag):
        report = verify_envelope(n, tag, SMALL_GRID, workers=2)
        assert report.passed(1e-13)
        assert report.max_slack >= report.min_slack

    @pytest.mark.slow
    @pytest.mark.parametrize("tag", list(EnvelopeTag))
    def test_envelope_full_grid(self, tag):
        """Acceptance-size grid for every degree"""
        for n in ALL_CHEB:
            assert verify_envelope(n, tag).passed(1e-13)

    def test_cheb_lower_samples_validity_ranges(self):
        report = verify_envelope(7, "cheb-lower", SMALL_GRID)
        assert report.range_min_slack is not None
        assert report.range_min_slack >= -1e-13
        other = verify_envelope(7, "cheb-upper", SMALL_GRID)
        assert other.range_min_slack is None

    def test_slack_is_zero_at_one(self):
        slack = envelope_slack(5, EnvelopeTag.TAYLOR_LOWER, np.array([1.0]))
        assert slack[0] == pytest.approx(0.0, abs=1e-15)

    def test_worker_count_does_not_change_result(self):
        one = verify_envelope(9, "cheb-lower", SMALL_GRID, workers=1)
        four = verify_envelope(9, "cheb-lower", SMALL_GRID, workers=4)
        assert one.min_slack == four.min_slack
        assert one.argmin_x == four.argmin_x

    def test_grid_includes_endpoints(self):
        x = GridSpec(uniform=11, endpoint=5).points()
        assert x[0] == 0.0 and x[-1] == 1.0
        assert np.all(np.diff(x) > 0)

    def test_unknown_tag(self):
        with pytest.raises(InvalidTag):
            parse_tag("cheb-sideways")

    def test_report_row(self):
        row = verify_envelope(3, "taylor-upper", SMALL_GRID).as_row()
        assert row["n"] == 3
        assert row["tag"] == "taylor-upper"


class TestValidityRanges:
    def test_gini_covers_whole_interval(self):
        ranges = validity_ranges(2)
        assert ranges.near_one == (0.0, 1.0)
        assert ranges.near_zero[1] == pytest.approx(math.exp(-1.0))

    def test_odd_and_even_near_one(self):
        assert validity_ranges(3).near_one[0] == pytest.approx(1 - 2 / 11)
        assert validity_ranges(4).near_one[0] == pytest.approx(1 - 9 / 32)

    @pytest.mark.parametrize("n", ALL_CHEB)
    def test_near_zero_shrinks_inside_unit_interval(self, n):
        lo, hi = validity_ranges(n).near_zero
        assert lo == 0.0 and 0.0 < hi < 1.0
