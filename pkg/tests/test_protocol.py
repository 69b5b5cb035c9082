"""End-to-end commitment protocol: honest runs, optimal cheats, attack states."""

import math

import numpy as np
import pytest

from qbclab import (
    CheatReport,
    CrossCheckError,
    DEFAULT_TOLS,
    DensityMatrix,
    DimMismatchError,
    EpsOutOfRegimeWarning,
    InvariantViolationError,
    OutOfRangeError,
    ProtocolConfig,
    alice_lower_bound,
    baseline_protocol,
    basis_state,
    build_omega_b,
    cheating_alice_value,
    cheating_bob_value,
    eps_regime_limit,
    generic_attack,
    honest_run,
    simulate_alice_attack,
    solve_optimal,
    trace_distance,
)

# Frozen constrained optimum at p = 1/2: (sqrt(1/8) + sqrt(1/4))^2
BALANCED_ALICE = 0.7285533905932737


class TestConfig:
    def test_domain(self):
        with pytest.raises(OutOfRangeError):
            ProtocolConfig(p=-0.1)
        with pytest.raises(OutOfRangeError):
            ProtocolConfig(p=1.1)
        with pytest.raises(OutOfRangeError):
            ProtocolConfig(p=0.5, eps=-0.01)
        with pytest.raises(OutOfRangeError):
            ProtocolConfig(p=0.5, garbage_dim=0)

    def test_boundaries_are_allowed(self):
        assert ProtocolConfig(p=0.0).p == 0.0
        assert ProtocolConfig(p=1.0).p == 1.0

    def test_regime_flag(self):
        assert ProtocolConfig(p=0.5, eps=0.1).eps_in_regime
        assert not ProtocolConfig(p=0.5, eps=0.2).eps_in_regime
        assert ProtocolConfig(p=0.5, eps=0.1).eps_in_regime == (
            0.1 < eps_regime_limit(0.5)
        )


class TestCommittedStates:
    def test_balanced_reduced_state_layout(self):
        cfg = ProtocolConfig(p=0.5)
        for bit in (0, 1):
            state = build_omega_b(cfg, bit)
            sigma = state.receiver_reduced.matrix
            assert sigma.shape == (6, 6)
            # flat receiver order is (outcome, opening, garbage); the bit
            # letter sits in the losing sector, escape in the winning one
            assert sigma[bit, bit] == pytest.approx(0.5, abs=1e-12)
            assert sigma[5, 5] == pytest.approx(0.5, abs=1e-12)
            assert np.sum(np.abs(sigma)) == pytest.approx(1.0, abs=1e-12)

    def test_committed_states_distance_is_p(self):
        for p in (0.0, 0.25, 0.4786, 0.8, 1.0):
            cfg = ProtocolConfig(p=p)
            s0 = build_omega_b(cfg, 0).receiver_reduced
            s1 = build_omega_b(cfg, 1).receiver_reduced
            assert trace_distance(s0, s1) == pytest.approx(p, abs=1e-12)

    def test_degenerate_p_one_is_pure(self):
        cfg = ProtocolConfig(p=1.0)
        sigma = build_omega_b(cfg, 1).receiver_reduced.matrix
        assert sigma[1, 1] == pytest.approx(1.0, abs=1e-12)

    def test_wider_garbage_register(self):
        cfg = ProtocolConfig(p=0.3, garbage_dim=3)
        sigma = build_omega_b(cfg, 1).receiver_reduced.matrix
        assert sigma.shape == (18, 18)
        assert sigma[3, 3] == pytest.approx(0.3, abs=1e-12)   # (lose, 1, 0)
        assert sigma[17, 17] == pytest.approx(0.7, abs=1e-12)  # (win, 2, 2)

    def test_bit_domain(self):
        with pytest.raises(OutOfRangeError):
            build_omega_b(ProtocolConfig(p=0.5), 2)


class TestHonestRuns:
    def test_perfect_completeness(self):
        for p in (0.1, 0.4786, 0.9):
            cfg = ProtocolConfig(p=p)
            for bit in (0, 1):
                assert honest_run(cfg, bit) == pytest.approx(1.0, abs=1e-12)

    def test_completeness_with_garbage(self):
        cfg = ProtocolConfig(p=0.6, garbage_dim=2)
        assert honest_run(cfg, 0) == pytest.approx(1.0, abs=1e-12)


class TestCheatingReceiver:
    def test_balanced_value(self):
        report = cheating_bob_value(ProtocolConfig(p=0.5))
        assert report.alice_value is None
        assert report.bob_value == pytest.approx(0.75, abs=1e-12)
        assert report.params["p_prime"] == pytest.approx(0.5)

    def test_discrimination_formula(self):
        for p in (0.2, 0.4786, 0.9):
            report = cheating_bob_value(ProtocolConfig(p=p))
            assert report.bob_value == pytest.approx(0.5 * (1 + p), abs=1e-12)

    def test_bias_shifts_the_flip(self):
        report = cheating_bob_value(ProtocolConfig(p=0.5, eps=0.01))
        assert report.params["p_prime"] == pytest.approx(0.51)
        assert report.bob_value == pytest.approx(0.755, abs=1e-9)


class TestCheatingCommitter:
    def test_balanced_frozen_value(self):
        report = cheating_alice_value(ProtocolConfig(p=0.5))
        assert report.bob_value is None
        assert report.alice_value == pytest.approx(BALANCED_ALICE, abs=1e-12)
        assert report.params["r0"] == pytest.approx(0.25)
        assert report.params["r2"] == pytest.approx(0.5)

    def test_matches_committer_curve(self):
        for p in (0.3, 0.4786, 0.7):
            report = cheating_alice_value(ProtocolConfig(p=p))
            assert report.alice_value == pytest.approx(alice_lower_bound(p), abs=1e-12)

    def test_bias_raises_the_value(self):
        # closed form with slack: openings share p - eps, escape at the cap
        p, eps = 0.5, 0.05
        report = cheating_alice_value(ProtocolConfig(p=p, eps=eps))
        expected = (math.sqrt(p * (p - eps) / 2) + math.sqrt((1 - p) * (1 - p + eps))) ** 2
        assert report.alice_value == pytest.approx(expected, abs=1e-12)
        assert report.alice_value > BALANCED_ALICE

    def test_bias_beyond_budget_rejected(self):
        with pytest.raises(OutOfRangeError):
            cheating_alice_value(ProtocolConfig(p=0.3, eps=0.4))

    def test_out_of_regime_warns(self):
        cfg = ProtocolConfig(p=0.5, eps=eps_regime_limit(0.5) * 1.2)
        with pytest.warns(EpsOutOfRegimeWarning):
            cheating_alice_value(cfg)


class TestAttackSimulation:
    def test_matches_the_closed_form(self):
        for p in (0.3, 0.4786, 0.7):
            cfg = ProtocolConfig(p=p)
            accept0, accept1 = simulate_alice_attack(cfg)
            average = 0.5 * (accept0 + accept1)
            assert average == pytest.approx(alice_lower_bound(p), abs=1e-6)
            # the attack is symmetric across the two openings
            assert accept0 == pytest.approx(accept1, abs=1e-9)

    def test_degenerate_endpoints(self):
        both = simulate_alice_attack(ProtocolConfig(p=0.0))
        assert both[0] == pytest.approx(1.0, abs=1e-9)
        assert both[1] == pytest.approx(1.0, abs=1e-9)
        accept0, accept1 = simulate_alice_attack(ProtocolConfig(p=1.0))
        assert 0.5 * (accept0 + accept1) == pytest.approx(0.5, abs=1e-6)

    def test_requires_zero_bias(self):
        with pytest.raises(OutOfRangeError):
            simulate_alice_attack(ProtocolConfig(p=0.5, eps=0.01))

    def test_survives_wider_garbage(self):
        accept0, accept1 = simulate_alice_attack(ProtocolConfig(p=0.4, garbage_dim=2))
        assert 0.5 * (accept0 + accept1) == pytest.approx(alice_lower_bound(0.4), abs=1e-6)


class TestOptimalPoint:
    def test_cheat_values_meet_at_the_crossing(self):
        t_star, p_star = solve_optimal()
        cfg = ProtocolConfig(p=t_star)
        alice = cheating_alice_value(cfg).alice_value
        bob = cheating_bob_value(cfg).bob_value
        assert alice == pytest.approx(p_star, abs=1e-9)
        assert bob == pytest.approx(p_star, abs=1e-12)
        assert alice == pytest.approx(bob, abs=1e-9)


class TestBaseline:
    def test_three_quarters_both_sides(self):
        report = baseline_protocol()
        assert report.bob_value == pytest.approx(0.75, abs=1e-12)
        assert report.alice_value == pytest.approx(0.75, abs=2e-3)
        assert report.params["r2"] == pytest.approx(2.0 / 3.0, abs=2e-3)


class TestGenericAttack:
    def test_identical_states(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]))
        report = generic_attack(rho, rho)
        assert report.alice_value == pytest.approx(1.0, abs=1e-7)
        assert report.bob_value == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_states(self):
        zero = basis_state((2,), (0,)).density()
        one = basis_state((2,), (1,)).density()
        report = generic_attack(zero, one)
        assert report.bob_value == pytest.approx(1.0, abs=1e-12)
        assert report.alice_value == pytest.approx(0.5, abs=1e-7)

    def test_committed_pair_sits_on_both_curves(self):
        cfg = ProtocolConfig(p=0.4786)
        s0 = build_omega_b(cfg, 0).receiver_reduced
        s1 = build_omega_b(cfg, 1).receiver_reduced
        report = generic_attack(s0, s1)
        assert report.bob_value == pytest.approx(0.5 * (1 + cfg.p), abs=1e-9)
        assert report.alice_value == pytest.approx(alice_lower_bound(cfg.p), abs=1e-7)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatchError):
            generic_attack(
                basis_state((2,), (0,)).density(), basis_state((3,), (0,)).density()
            )

    def test_floor_check_can_fire(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]))
        impossible = DEFAULT_TOLS.replaced(witness_floor=1.5)
        with pytest.raises(CrossCheckError):
            generic_attack(rho, rho, tols=impossible)


class TestCheatReport:
    def test_values_validated(self):
        with pytest.raises(InvariantViolationError):
            CheatReport(alice_value=1.2, bob_value=None)

    def test_max_value(self):
        report = CheatReport(alice_value=0.7, bob_value=0.8)
        assert report.max_value == 0.8
