import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspbound.bounds import (
    DomainError,
    FitError,
    GbParams,
    beta_fn,
    closed_form_ratio,
    fit_params,
    gb_pdf,
    hypergeometric_f,
    incomplete_beta,
    incomplete_beta_quadrature,
    incomplete_beta_series,
    iterate_bound,
    iterations_for_target,
    truncated_mean,
)


def adaptive_simpson(f, a, b, tol=1e-14, depth=60):
    """Independent quadrature oracle (recursive Simpson)."""

    def simpson(lo, hi):
        mid = (lo + hi) / 2
        return (hi - lo) / 6 * (f(lo) + 4 * f(mid) + f(hi))

    def rec(lo, hi, whole, eps, d):
        mid = (lo + hi) / 2
        left, right = simpson(lo, mid), simpson(mid, hi)
        if d <= 0 or abs(left + right - whole) <= 15 * eps:
            return left + right + (left + right - whole) / 15
        return rec(lo, mid, left, eps / 2, d - 1) + rec(mid, hi, right, eps / 2, d - 1)

    return rec(a, b, simpson(a, b), tol, depth)


class TestBetaFn:
    def test_uniform(self):
        assert beta_fn(1, 1) == pytest.approx(1.0, abs=0)

    def test_factorial_identity(self):
        assert beta_fn(2, 3) == pytest.approx(1 / 12, rel=1e-14)

    def test_against_simpson_oracle(self):
        a, b = 2.5, 3.5
        oracle = adaptive_simpson(lambda t: t ** (a - 1) * (1 - t) ** (b - 1), 0.0, 1.0)
        assert beta_fn(a, b) == pytest.approx(oracle, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_fn(0, 1)


class TestHypergeometric:
    def test_at_zero(self):
        assert hypergeometric_f(3.7, -2.2, 1.5, 0.0) == 1.0

    def test_terminating_series(self):
        assert hypergeometric_f(2, -1, 3, 0.5) == pytest.approx(2 / 3, rel=1e-14)

    def test_log_identity(self):
        # 2F1(1, 1; 2; x) = -ln(1 - x) / x
        assert hypergeometric_f(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            hypergeometric_f(1, 1, -2, 0.5)
        with pytest.raises(DomainError):
            hypergeometric_f(1, 1, 2, 1.5)


class TestIncompleteBeta:
    def test_full_integral(self):
        for a, b in [(1.5, 2.5), (2, 2), (3.3, 1.2)]:
            assert incomplete_beta(1.0, a, b) == pytest.approx(beta_fn(a, b), rel=1e-10)

    def test_polynomial_case(self):
        # integrand x(1-x); antiderivative t^2/2 - t^3/3
        assert incomplete_beta(0.5, 2, 2) == pytest.approx(1 / 12, rel=1e-13)

    def test_dual_route_agreement_at_switch(self):
        s = incomplete_beta_series(0.9, 2.5, 3.5)
        q = incomplete_beta_quadrature(0.9, 2.5, 3.5)
        assert s == pytest.approx(q, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            incomplete_beta(1.5, 2, 2)
        with pytest.raises(DomainError):
            incomplete_beta(-0.1, 2, 2)


class TestPdf:
    def test_uniform(self):
        p = GbParams(1, 1, 0, 1)
        for x in (0.0, 0.3, 1.0):
            assert gb_pdf(x, p) == pytest.approx(1.0)

    def test_symmetric_peak(self):
        assert gb_pdf(0.5, GbParams(2, 2, 0, 1)) == pytest.approx(1.5)

    @pytest.mark.parametrize("alpha,beta,lo,hi", [
        (2, 2, 0, 1), (1.5, 3, 10, 20), (2.5, 1.2, 1, 5), (4, 4, 100, 250),
    ])
    def test_integrates_to_one(self, alpha, beta, lo, hi):
        p = GbParams(alpha, beta, lo, hi)
        total = adaptive_simpson(lambda x: gb_pdf(x, p), lo, hi, tol=1e-13)
        assert total == pytest.approx(1.0, rel=1e-10)

    def test_outside_support(self):
        with pytest.raises(DomainError):
            gb_pdf(2.0, GbParams(2, 2, 0, 1))


class TestTruncatedMean:
    def test_untruncated_symmetric(self):
        assert truncated_mean(GbParams(2, 2, 0, 1), 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_polynomial_value(self):
        # numerator (5/192), denominator (1/12)
        assert truncated_mean(GbParams(2, 2, 0, 1), 0.5) == pytest.approx(0.3125, rel=1e-12)

    def test_affine_scaling(self):
        assert truncated_mean(GbParams(2, 2, 100, 200), 0.5) == pytest.approx(131.25, rel=1e-12)

    def test_strictly_increasing_and_bounded(self):
        p = GbParams(2.3, 3.1, 1, 5)
        prev = None
        for b in np.linspace(0.05, 1.0, 20):
            m = truncated_mean(p, float(b))
            assert p.lower < m < p.lower + (p.upper - p.lower) * b
            if prev is not None:
                assert m > prev
            prev = m

    def test_domain(self):
        with pytest.raises(DomainError):
            truncated_mean(GbParams(2, 2, 0, 1), 0.0)


class TestIterateBound:
    def test_reference_values(self):
        states, clipped = iterate_bound(GbParams(2, 2, 1, 5), 2)
        assert not clipped
        assert states[0].mean == pytest.approx(1.5)
        assert states[1].truncation == pytest.approx(0.125)
        # 1 + 4 * ratio of incomplete-beta integrals at 0.125
        assert states[1].mean == pytest.approx(1.3295454545, rel=1e-9)

    def test_closed_form_dominates_means(self):
        for alpha in (1.5, 2, 3, 5):
            for beta in (1.5, 2, 4):
                p = GbParams(alpha, beta, 1, 5)
                states, _ = iterate_bound(p, 10)
                for s in states:
                    assert s.mean <= closed_form_ratio(alpha, s.k) * p.lower + 1e-9

    def test_means_non_increasing(self):
        states, _ = iterate_bound(GbParams(2.5, 3.5, 1, 10), 15)
        means = [s.mean for s in states]
        assert all(a >= b - 1e-12 for a, b in zip(means, means[1:]))

    def test_start_clipped_when_upper_too_small(self):
        states, clipped = iterate_bound(GbParams(2, 2, 10, 12), 3)
        assert clipped
        assert states[0].truncation == 1.0
        assert states[0].mean == pytest.approx(12.0)

    def test_bad_k(self):
        with pytest.raises(DomainError):
            iterate_bound(GbParams(2, 2, 1, 5), 0)


class TestClosedForm:
    def test_first_iteration_is_christofides_level(self):
        for alpha in (0.5, 1, 2, 7):
            assert closed_form_ratio(alpha, 1) == 1.5

    def test_direct_substitution(self):
        assert closed_form_ratio(2, 3) == pytest.approx(1.28125, abs=0)

    def test_high_k_value(self):
        assert closed_form_ratio(2, 18) == pytest.approx(1.0037584734, rel=1e-9)
        assert closed_form_ratio(2, 18) < 220 / 219

    def test_strictly_decreasing_to_one(self):
        vals = [closed_form_ratio(3, k) for k in range(1, 60)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(1.0, abs=1e-4)


class TestIterationsForTarget:
    def test_inapproximability_constant(self):
        assert iterations_for_target(2, 220 / 219) == 18
        assert closed_form_ratio(2, 17) > 220 / 219

    def test_christofides_target(self):
        for alpha in (0.7, 2, 9):
            assert iterations_for_target(alpha, 1.5) == 1

    def test_direct_example(self):
        assert iterations_for_target(2, 1.3) == 3

    @pytest.mark.parametrize("alpha", [1.1, 1.7, 2, 3.5, 8])
    @pytest.mark.parametrize("target", [1.45, 1.2, 1.01, 220 / 219])
    def test_exact_inverse(self, alpha, target):
        k = iterations_for_target(alpha, target)
        assert closed_form_ratio(alpha, k) <= target
        if k > 1:
            assert closed_form_ratio(alpha, k - 1) > target

    def test_domain(self):
        with pytest.raises(DomainError):
            iterations_for_target(2, 1.0)


class TestFit:
    def test_symmetric_moments(self):
        # two samples with mean 0.5 and sample variance 0.05
        a = math.sqrt(0.025)
        p = fit_params([0.5 - a, 0.5 + a], 0.0, 1.0)
        assert p.alpha == pytest.approx(2.0, rel=1e-12)
        assert p.beta == pytest.approx(2.0, rel=1e-12)

    def test_skewed_moments(self):
        a = math.sqrt(0.015)
        p = fit_params([0.25 - a, 0.25 + a], 0.0, 1.0)
        assert p.alpha == pytest.approx(1.3125, rel=1e-12)
        assert p.beta == pytest.approx(3.9375, rel=1e-12)
        assert p.alpha / (p.alpha + p.beta) == pytest.approx(0.25, rel=1e-12)

    def test_zero_variance(self):
        with pytest.raises(FitError, match="variance"):
            fit_params([2.0, 2.0, 2.0], 0.0, 4.0)

    def test_overdispersed(self):
        with pytest.raises(FitError, match="more samples"):
            fit_params([0.01, 0.99], 0.0, 1.0)

    def test_outside_support(self):
        with pytest.raises(FitError):
            fit_params([0.5, 1.5], 0.0, 1.0)

    @given(
        st.lists(st.floats(min_value=0.05, max_value=0.95), min_size=3, max_size=40),
    )
    @settings(max_examples=60, deadline=None)
    def test_moment_round_trip(self, xs):
        xs = np.asarray(xs)
        m, v = xs.mean(), xs.var(ddof=1)
        if v <= 1e-12 or m * (1 - m) / v - 1 <= 0:
            return
        p = fit_params(xs, 0.0, 1.0)
        s = p.alpha + p.beta
        assert p.alpha / s == pytest.approx(m, rel=1e-9)
        assert p.alpha * p.beta / (s * s * (s + 1)) == pytest.approx(v, rel=1e-9)

    def test_shape_precondition_flag(self):
        assert GbParams(2, 2, 0, 1).shape_precondition_met
        assert not GbParams(0.5, 2, 0, 1).shape_precondition_met
