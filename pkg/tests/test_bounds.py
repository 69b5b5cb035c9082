"""Scalar cheat-value curves, their crossing, and the reveal maximization."""

import math

import pytest

from qbclab import (
    AppendixInstance,
    ConstraintViolatedError,
    EpsTooLargeWarning,
    OutOfRangeError,
    SHRINK,
    alice_lower_bound,
    analytic_maximizer,
    appendix_derivative_checks,
    appendix_maximize,
    appendix_value_raw,
    bob_lower_bound,
    bound_curve,
    eps_regime_limit,
    solve_optimal,
    unconstrained_maximize,
)

# Frozen by an independent root computation: with a = 1 - 1/sqrt(2) the
# crossing of (1 - a t)^2 and (1 + t)/2 solves a^2 t^2 - (2a + 1/2) t + 1/2 = 0,
# whose relevant root is (2a + 1/2 - sqrt((2a + 1/2)^2 - 2 a^2)) / (2 a^2).
T_STAR = 0.47859270414301136
P_STAR = 0.7392963520715057


class TestCurves:
    def test_endpoints(self):
        assert alice_lower_bound(0.0) == 1.0
        assert alice_lower_bound(1.0) == pytest.approx(0.5, abs=1e-15)
        assert bob_lower_bound(0.0) == 0.5
        assert bob_lower_bound(1.0) == 1.0

    def test_monotone(self):
        ts = [i / 100 for i in range(101)]
        alices = [alice_lower_bound(t) for t in ts]
        bobs = [bob_lower_bound(t) for t in ts]
        assert all(a1 >= a2 for a1, a2 in zip(alices, alices[1:]))
        assert all(b1 <= b2 for b1, b2 in zip(bobs, bobs[1:]))

    def test_domain(self):
        with pytest.raises(OutOfRangeError):
            alice_lower_bound(-0.1)
        with pytest.raises(OutOfRangeError):
            bob_lower_bound(1.1)

    def test_curve_sampling(self):
        curve = bound_curve(step=1e-2)
        assert len(curve) == 101
        assert curve[0].t == 0.0
        assert curve[-1].t == 1.0
        assert curve[0].alice == 1.0
        assert curve[-1].bob == 1.0


class TestCrossing:
    def test_frozen_root(self):
        t_star, p_star = solve_optimal()
        assert t_star == pytest.approx(T_STAR, abs=1e-10)
        assert p_star == pytest.approx(P_STAR, abs=1e-10)

    def test_quadratic_residual_vanishes(self):
        # independent oracle: the crossing satisfies the quadratic exactly
        a = SHRINK
        residual = a * a * T_STAR * T_STAR - (2 * a + 0.5) * T_STAR + 0.5
        assert abs(residual) < 1e-12

    def test_curves_agree_at_the_root(self):
        t_star, _ = solve_optimal()
        assert alice_lower_bound(t_star) == pytest.approx(
            bob_lower_bound(t_star), abs=1e-10
        )

    def test_shrink_constant(self):
        assert SHRINK == pytest.approx(1.0 - 1.0 / math.sqrt(2.0), abs=1e-16)


class TestAppendixInstances:
    def test_value_recomputed_when_omitted(self):
        inst = AppendixInstance(p=0.5, eps=0.0, r0=0.25, r1=0.25, r2=0.5)
        assert inst.value == pytest.approx(
            appendix_value_raw(0.5, 0.25, 0.25, 0.5), abs=1e-15
        )

    def test_escape_cap_enforced(self):
        with pytest.raises(ConstraintViolatedError):
            AppendixInstance(p=0.5, eps=0.0, r0=0.2, r1=0.2, r2=0.6)

    def test_weight_budget_enforced(self):
        with pytest.raises(ConstraintViolatedError):
            AppendixInstance(p=0.5, eps=0.0, r0=0.5, r1=0.5, r2=0.3)

    def test_negative_weight_rejected(self):
        with pytest.raises(ConstraintViolatedError):
            AppendixInstance(p=0.5, eps=0.0, r0=-0.1, r1=0.3, r2=0.5)

    def test_stored_value_must_match(self):
        with pytest.raises(ConstraintViolatedError):
            AppendixInstance(p=0.5, eps=0.0, r0=0.25, r1=0.25, r2=0.5, value=0.9)

    def test_domain(self):
        with pytest.raises(OutOfRangeError):
            AppendixInstance(p=0.0, eps=0.0, r0=0.0, r1=0.0, r2=0.5)


class TestConstrainedMaximization:
    def test_frozen_balanced_case(self):
        # independent recomputation: r0 = r1 = p/2, r2 = 1 - p at p = 1/2
        # gives (sqrt(1/8) + sqrt(1/4))^2 = 0.7285533905932737
        inst = appendix_maximize(p=0.5, eps=0.0)
        frozen = (math.sqrt(0.125) + 0.5) ** 2
        assert frozen == pytest.approx(0.7285533905932737, abs=1e-16)
        assert inst.value == pytest.approx(frozen, abs=2e-3)
        analytic = analytic_maximizer(p=0.5, eps=0.0)
        assert analytic.value == pytest.approx(frozen, abs=1e-12)
        assert analytic.value >= inst.value - 2e-3

    def test_matches_committer_curve_at_eps_zero(self):
        for p in (0.2, 0.4786, 0.7):
            analytic = analytic_maximizer(p=p, eps=0.0)
            assert analytic.value == pytest.approx(alice_lower_bound(p), abs=1e-12)

    def test_grid_never_beats_analytic_in_regime(self):
        for p in (0.3, 0.5, 0.7):
            for eps in (0.0, eps_regime_limit(p) / 2):
                grid = appendix_maximize(p=p, eps=eps, grid_step=2e-3)
                analytic = analytic_maximizer(p=p, eps=eps)
                assert analytic.value >= grid.value - 4e-3

    def test_out_of_regime_warns(self):
        p = 0.5
        with pytest.warns(EpsTooLargeWarning):
            appendix_maximize(p=p, eps=eps_regime_limit(p) * 1.5, grid_step=5e-3)

    def test_regime_limit_frozen(self):
        # p (1 - 1/(2 - p)) at p = 1/2 is 1/6
        assert eps_regime_limit(0.5) == pytest.approx(1.0 / 6.0, abs=1e-15)


class TestUnconstrainedMaximization:
    def test_balanced_case_reaches_three_quarters(self):
        inst = unconstrained_maximize(p=0.5, grid_step=1e-3)
        assert inst.value == pytest.approx(0.75, abs=2e-3)
        # maximizer sits at r0 = r1 = 1/6, r2 = 2/3
        assert inst.r2 == pytest.approx(2.0 / 3.0, abs=2e-3)
        assert inst.r0 == pytest.approx(1.0 / 6.0, abs=2e-3)
        assert appendix_value_raw(0.5, 1 / 6, 1 / 6, 2 / 3) == pytest.approx(
            0.75, abs=1e-12
        )


class TestDerivativeChecks:
    def test_flip_locations(self):
        for p in (0.3, 0.5, 0.9):
            report = appendix_derivative_checks(p)
            assert report.split_within_tol, (p, report.split_flip)
            assert report.escape_within_tol, (p, report.escape_flip)
            assert report.split_flip_expected == pytest.approx(p / 2.0)
            assert report.escape_flip_expected == pytest.approx(1.0 - p / (2.0 - p))

    def test_flip_locations_with_slack(self):
        report = appendix_derivative_checks(0.6, eps=0.1)
        assert report.split_flip_expected == pytest.approx(0.25)
        assert report.split_within_tol

    def test_sign_patterns_actually_flip(self):
        report = appendix_derivative_checks(0.5)
        assert 1 in report.split_sign_pattern
        assert -1 in report.split_sign_pattern
        assert 1 in report.escape_sign_pattern
        assert -1 in report.escape_sign_pattern

    def test_exhausted_budget_rejected(self):
        with pytest.raises(OutOfRangeError):
            appendix_derivative_checks(0.3, eps=0.3)
