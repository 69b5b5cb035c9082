"""The coin-flipping-based commitment protocol and its cheating analyses.

Commitment to bit ``b`` runs one unbalanced coin flip in superposition and,
on the losing branch, writes ``b`` into matching three-level registers on
both sides; the winning branch writes the escape symbol instead. The
receiver's reduced state is then ``p |b><b| + (1 - p) |2><2|`` in an
effective three-letter basis, and every cheating question becomes a
question about such states:

* a cheating receiver discriminates the two reduced states (optimal
  measurement, value ``(1 + p')/2`` at his coin-flip cap ``p' = p + eps``);
* a cheating committer prepares the flip honestly but keeps the opening
  superposed, then steers with a local unitary at reveal time (optimal value
  given by the constrained maximization of :mod:`qbclab.bounds`).

``generic_attack`` applies the same two strategies to an arbitrary pair of
reduced states, which is what makes the 0.739 floor protocol independent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bounds
from .errors import (
    CrossCheckError,
    DimMismatchError,
    EpsOutOfRegimeWarning,
    InvariantViolationError,
    OutOfRangeError,
)
from .metrics import fidelity, helstrom_povm, trace_distance
from .qmat import DensityMatrix, PureState, basis_state, partial_trace
from .tolerances import DEFAULT_TOLS, Tolerances
from .wcf import LOSE, WIN, cheating_bob_wcf_state, ideal_wcf_state

ESCAPE = 2  # third letter of the opening registers


@dataclass(frozen=True)
class ProtocolConfig:
    """Losing probability ``p``, coin-flip slack ``eps``, garbage dimension."""

    p: float
    eps: float = 0.0
    garbage_dim: int = 1

    def __post_init__(self):
        # Boundary values describe degenerate but well-defined commitments;
        # only the interior carries any security.
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRangeError(f"p={self.p!r} outside [0, 1]")
        if self.eps < 0.0:
            raise OutOfRangeError(f"eps={self.eps!r} negative")
        if self.garbage_dim < 1:
            raise OutOfRangeError(f"garbage_dim={self.garbage_dim!r} must be at least 1")

    @property
    def eps_in_regime(self) -> bool:
        """Whether the committer analysis below is provably tight."""
        return self.eps < bounds.eps_regime_limit(self.p)


@dataclass(frozen=True, eq=False)
class CommitmentState:
    """Joint state after honestly committing to ``bit``.

    Registers: (committer outcome, committer opening, receiver outcome,
    receiver opening, receiver garbage). ``receiver_reduced`` is validated
    against the closed form ``p |b><b| + (1-p) |2><2|`` in the effective
    basis at construction.
    """

    bit: int
    joint: PureState
    receiver_reduced: DensityMatrix


@dataclass(frozen=True)
class CheatReport:
    """Cheat values achieved by the simulated strategies.

    Single-sided analyses leave the other side as None; ``params`` records
    the witness parameters of the strategy (the adversary's flip probability
    or the reveal weights).
    """

    alice_value: Optional[float]
    bob_value: Optional[float]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, value in (("alice_value", self.alice_value), ("bob_value", self.bob_value)):
            if value is not None and not -1e-12 <= value <= 1.0 + 1e-12:
                raise InvariantViolationError(f"{name}={value!r} outside [0, 1]")

    @property
    def max_value(self) -> float:
        values = [v for v in (self.alice_value, self.bob_value) if v is not None]
        return max(values)


def _effective_letter(cfg: ProtocolConfig, letter: int) -> int:
    """Flat receiver index of |outcome, opening, garbage> for a basis letter."""
    g = cfg.garbage_dim
    if letter == ESCAPE:
        return int(np.ravel_multi_index((WIN, ESCAPE, g - 1), (2, 3, g)))
    return int(np.ravel_multi_index((LOSE, letter, 0), (2, 3, g)))


def build_omega_b(cfg: ProtocolConfig, bit: int, tols: Tolerances = DEFAULT_TOLS) -> CommitmentState:
    """Honest post-commit state for ``bit`` in {0, 1}."""
    if bit not in (0, 1):
        raise OutOfRangeError(f"bit={bit!r} not a bit")
    g = cfg.garbage_dim
    dims = (2, 3, 2, 3, g)
    amp = np.zeros(int(np.prod(dims)), dtype=complex)
    lose_idx = (LOSE, bit, LOSE, bit, 0)
    win_idx = (WIN, ESCAPE, WIN, ESCAPE, g - 1)
    amp[int(np.ravel_multi_index(lose_idx, dims))] = math.sqrt(cfg.p)
    amp[int(np.ravel_multi_index(win_idx, dims))] = math.sqrt(1.0 - cfg.p)
    joint = PureState(dims, amp, tols=tols)
    reduced = partial_trace(joint, keep=(2, 3, 4), tols=tols)

    expected = np.zeros((6 * g, 6 * g), dtype=complex)
    expected[_effective_letter(cfg, bit), _effective_letter(cfg, bit)] = cfg.p
    expected[_effective_letter(cfg, ESCAPE), _effective_letter(cfg, ESCAPE)] = 1.0 - cfg.p
    if np.max(np.abs(reduced.matrix - expected)) > tols.reduced_state_match:
        raise CrossCheckError(
            "commitment_reduced_state",
            float(np.max(np.abs(reduced.matrix - expected))),
            0.0,
        )
    return CommitmentState(bit=bit, joint=joint, receiver_reduced=reduced)


def honest_run(cfg: ProtocolConfig, bit: int, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Acceptance probability of the honest commit-then-reveal execution.

    The run state is assembled step by step (coin flip, then the
    outcome-conditioned letter writes) rather than copied from the closed
    form, and the receiver's reveal-time projection onto the expected state
    is evaluated against it. Honest play must accept with certainty.
    """
    if bit not in (0, 1):
        raise OutOfRangeError(f"bit={bit!r} not a bit")
    g = cfg.garbage_dim
    flip = ideal_wcf_state(cfg.p, garbage_dims=(g,), tols=tols)
    flip_amp = flip.state.amplitudes.reshape(2, 2, g)

    dims = (2, 3, 2, 3, g)
    run = np.zeros(dims, dtype=complex)
    # Losing branch writes the committed bit, winning branch the escape letter.
    run[LOSE, bit, LOSE, bit, :] = flip_amp[LOSE, LOSE, :]
    run[WIN, ESCAPE, WIN, ESCAPE, :] = flip_amp[WIN, WIN, :]
    run_state = PureState(dims, run.reshape(-1), tols=tols)

    expected = build_omega_b(cfg, bit, tols)
    overlap = complex(np.vdot(expected.joint.amplitudes, run_state.amplitudes))
    return float(abs(overlap) ** 2)


def cheating_bob_value(cfg: ProtocolConfig, tols: Tolerances = DEFAULT_TOLS) -> CheatReport:
    """Best guessing probability of a cheating receiver, by simulation.

    The receiver pushes the committer's losing probability to the cap
    ``p' = p + eps`` during the flip, then optimally discriminates the two
    possible reduced states. The simulated value is cross-checked against
    ``(1 + p')/2``.
    """
    g = cfg.garbage_dim
    psi_l = basis_state((2, g), (LOSE, 0))
    psi_w = basis_state((2, g), (WIN, g - 1))
    flip = cheating_bob_wcf_state(cfg.p, cfg.eps, psi_l, psi_w, tols=tols)
    p_prime = flip.p
    flip_amp = flip.state.amplitudes.reshape(2, 2, g)

    dims = (2, 3, 2, 3, g)
    states = []
    for bit in (0, 1):
        run = np.zeros(dims, dtype=complex)
        run[LOSE, bit, LOSE, bit, :] = flip_amp[LOSE, LOSE, :]
        run[WIN, ESCAPE, WIN, ESCAPE, :] = flip_amp[WIN, WIN, :]
        joint = PureState(dims, run.reshape(-1), tols=tols)
        states.append(partial_trace(joint, keep=(2, 3, 4), tols=tols))
    _, guess = helstrom_povm(states[0], states[1], tols)
    formula = 0.5 * (1.0 + p_prime)
    if abs(guess - formula) > tols.bob_value_match:
        raise CrossCheckError("cheating_receiver_value", guess, formula)
    return CheatReport(alice_value=None, bob_value=guess, params={"p_prime": p_prime})


def cheating_alice_value(
    cfg: ProtocolConfig,
    grid_step: float = 1e-3,
    cross_check: bool = True,
    tols: Tolerances = DEFAULT_TOLS,
) -> CheatReport:
    """Best reveal probability of a cheating committer.

    Closed form at the maximizing reveal weights: both openings carry
    ``(p - eps)/2`` and the escape letter sits at its cap ``1 - p + eps``.
    Cross-checked against the grid oracle of :mod:`qbclab.bounds` within
    twice the grid step. Outside the proven slack regime the closed form is
    still returned but flagged, and no optimality claim is made.
    """
    p, eps = cfg.p, cfg.eps
    if eps > p:
        raise OutOfRangeError(f"eps={eps!r} exceeds the opening weight p={p!r}")
    r0 = r1 = (p - eps) / 2.0
    r2 = 1.0 - p + eps
    branch = math.sqrt(p * r0) + math.sqrt((1.0 - p) * r2)
    value = branch * branch
    if not cfg.eps_in_regime:
        warnings.warn(
            f"eps={eps!r} outside the proven regime for p={p!r}; value is a lower bound only",
            EpsOutOfRegimeWarning,
        )
    elif cross_check:
        grid = bounds.appendix_maximize(p, eps, grid_step, tols)
        if abs(float(grid.value) - value) > 2.0 * grid_step:
            raise CrossCheckError("cheating_committer_grid", float(grid.value), value)
        if eps == 0.0:
            closed = bounds.alice_lower_bound(p)
            if abs(closed - value) > tols.closed_form:
                raise CrossCheckError("cheating_committer_closed_form", closed, value)
    return CheatReport(
        alice_value=value,
        bob_value=None,
        params={"r0": r0, "r1": r1, "r2": r2, "eps": eps},
    )


def simulate_alice_attack(cfg: ProtocolConfig, tols: Tolerances = DEFAULT_TOLS) -> tuple[float, float]:
    """State-level committer attack with an ideal flip (``eps`` must be 0).

    The committer runs the flip honestly but keeps the opening registers in
    superposition on the losing branch, then steers her side with the
    overlap-maximizing local unitary before revealing. Returns the simulated
    acceptance probabilities for revealing 0 and 1; each must match the
    squared fidelity between the steered reduced state and the honest one.
    """
    if cfg.eps != 0.0:
        raise OutOfRangeError("the state-level attack is defined for eps = 0")
    p = cfg.p
    g = cfg.garbage_dim
    dims = (2, 3, 2, 3, g)
    total = int(np.prod(dims))
    amp = np.zeros(total, dtype=complex)
    for letter in (0, 1):
        amp[int(np.ravel_multi_index((LOSE, letter, LOSE, letter, 0), dims))] = math.sqrt(p / 2.0)
    amp[int(np.ravel_multi_index((WIN, ESCAPE, WIN, ESCAPE, g - 1), dims))] = math.sqrt(1.0 - p)
    attack = PureState(dims, amp, tols=tols)
    steered = partial_trace(attack, keep=(2, 3, 4), tols=tols)

    a_dim = 6
    b_dim = 6 * g
    attack_matrix = attack.amplitudes.reshape(a_dim, b_dim)
    accepts = []
    for bit in (0, 1):
        honest = build_omega_b(cfg, bit, tols)
        target_matrix = honest.joint.amplitudes.reshape(a_dim, b_dim)
        cross = attack_matrix @ target_matrix.conj().T
        u, _, vh = np.linalg.svd(cross)
        steer = vh.conj().T @ u.conj().T
        overlap = complex(np.vdot(target_matrix, steer @ attack_matrix))
        accept = float(abs(overlap) ** 2)
        expected = fidelity(steered, honest.receiver_reduced, tols) ** 2
        if abs(accept - expected) > tols.attack_fidelity_match:
            raise CrossCheckError(f"steering_attack_bit{bit}", accept, expected)
        accepts.append(accept)

    average = 0.5 * (accepts[0] + accepts[1])
    formula = bounds.alice_lower_bound(p)
    if abs(average - formula) > tols.attack_formula_match:
        raise CrossCheckError("steering_attack_average", average, formula)
    return accepts[0], accepts[1]


def baseline_protocol(grid_step: float = 1e-3, tols: Tolerances = DEFAULT_TOLS) -> CheatReport:
    """Cheat values of the flip-free variant (equal weight, no escape cap).

    Without the coin flip the committer may place any weights on the three
    letters, so both parties reach 3/4: the receiver by discrimination of
    the half-distinguishable pair, the committer by the uncapped grid
    maximization.
    """
    third = np.zeros((3, 3), dtype=complex)
    third[ESCAPE, ESCAPE] = 0.5
    sigma = []
    for bit in (0, 1):
        m = third.copy()
        m[bit, bit] = 0.5
        sigma.append(DensityMatrix(m, tols=tols))
    _, bob_value = helstrom_povm(sigma[0], sigma[1], tols)
    grid = bounds.unconstrained_maximize(0.5, grid_step, tols)
    return CheatReport(
        alice_value=float(grid.value),
        bob_value=bob_value,
        params={"r0": grid.r0, "r1": grid.r1, "r2": grid.r2},
    )


def generic_attack(
    sigma0: DensityMatrix, sigma1: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> CheatReport:
    """Both universal strategies against arbitrary reduced commitment states.

    The receiver's value is optimal discrimination of the pair; the
    committer's is the average squared fidelity to the equal mixture,
    achievable by steering a purification. Their maximum is checked against
    the universal floor (``witness_floor - witness_slack``).
    """
    if sigma0.matrix.shape != sigma1.matrix.shape:
        raise DimMismatchError(
            f"states of dimension {sigma0.matrix.shape[0]} vs {sigma1.matrix.shape[0]}"
        )
    distance = trace_distance(sigma0, sigma1, tols)
    bob_value = 0.5 + 0.5 * distance
    mixture = DensityMatrix(0.5 * (sigma0.matrix + sigma1.matrix), tols=tols)
    fid0 = fidelity(mixture, sigma0, tols)
    fid1 = fidelity(mixture, sigma1, tols)
    alice_value = 0.5 * (fid0 * fid0 + fid1 * fid1)
    report = CheatReport(
        alice_value=alice_value,
        bob_value=bob_value,
        params={"trace_distance": distance},
    )
    floor = tols.witness_floor - tols.witness_slack
    if report.max_value < floor:
        raise CrossCheckError("universal_floor", report.max_value, floor)
    return report
