"""Weak coin flipping as an idealized primitive, plus bias composition.

The commitment protocol consumes a coin-flipping primitive as a black box:
an honest joint state with outcome registers on both sides, and adversary
caps on how far a cheater can push their winning probability. Near-perfect
balanced primitives are taken as given; what this module adds is a concrete
composition scheme producing arbitrary win probabilities from balanced
flips, a cascade that follows the binary expansion of the target. The
cascade is this package's own construction, so its security is never
assumed: ``composed_cheat_values`` evaluates the optimal adversary exactly
by dynamic programming over the cascade in rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadDepthError,
    CapViolatedError,
    CrossCheckError,
    InvariantViolationError,
    OutOfRangeError,
)
from .qmat import DensityMatrix, PureState, partial_trace
from .tolerances import DEFAULT_TOLS, Tolerances

LOSE, WIN = 0, 1  # committer outcome register encoding


@dataclass(frozen=True)
class WcfSpec:
    """Target win probability and slack of one coin-flipping primitive."""

    z: float
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.z <= 1.0:
            raise OutOfRangeError(f"z={self.z!r} outside [0, 1]")
        if self.eps < 0.0:
            raise OutOfRangeError(f"eps={self.eps!r} negative")

    @property
    def alice_cap(self) -> float:
        return min(self.z + self.eps, 1.0)

    @property
    def bob_cap(self) -> float:
        return min(1.0 - self.z + self.eps, 1.0)


@dataclass(frozen=True, eq=False)
class WcfJointState:
    """Joint outcome state of one flip; the first register is Alice's outcome.

    The two branches are orthogonal through the outcome registers, and
    Alice's reduced state is diag(p, 1 - p) with p her losing probability.
    """

    p: float
    state: PureState
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRangeError(f"p={self.p!r} outside [0, 1]")
        reduced = partial_trace(self.state, keep=(0,), tols=self.tols).matrix
        expected = np.diag([self.p, 1.0 - self.p]).astype(complex)
        if np.max(np.abs(reduced - expected)) > self.tols.reduced_state_match * 10:
            raise InvariantViolationError(
                "Alice's reduced state does not match diag(p, 1 - p)"
            )


def _garbage_dims(garbage_dims: Union[int, Sequence[int]]) -> tuple[int, ...]:
    if isinstance(garbage_dims, int):
        dims = (garbage_dims,)
    else:
        dims = tuple(int(d) for d in garbage_dims)
    if not dims or any(d < 1 for d in dims):
        raise OutOfRangeError(f"bad garbage register spec {garbage_dims!r}")
    return dims


def ideal_wcf_state(
    p: float, garbage_dims: Union[int, Sequence[int]] = 1, tols: Tolerances = DEFAULT_TOLS
) -> WcfJointState:
    """Honest joint state: matching outcomes plus fixed garbage states.

    Registers are (Alice outcome, Bob outcome, Bob garbage...). The losing
    branch carries the all-zeros garbage state, the winning branch the
    all-top one; for the default one-dimensional garbage both are trivial.
    """
    if not 0.0 <= p <= 1.0:
        raise OutOfRangeError(f"p={p!r} outside [0, 1]")
    gdims = _garbage_dims(garbage_dims)
    dims = (2, 2) + gdims
    amp = np.zeros(int(np.prod(dims)), dtype=complex)
    lose_idx = (LOSE, LOSE) + tuple(0 for _ in gdims)
    win_idx = (WIN, WIN) + tuple(d - 1 for d in gdims)
    amp[int(np.ravel_multi_index(lose_idx, dims))] = math.sqrt(p)
    amp[int(np.ravel_multi_index(win_idx, dims))] = math.sqrt(1.0 - p)
    return WcfJointState(p, PureState(dims, amp, tols=tols), tols=tols)


def cheating_bob_wcf_state(
    p: float,
    eps: float,
    psi_l: PureState,
    psi_w: PureState,
    p_prime: float | None = None,
    tols: Tolerances = DEFAULT_TOLS,
) -> WcfJointState:
    """Joint state reachable by a cheating receiver against an honest committer.

    The receiver may pick any branch states on his own registers and any
    losing probability ``p_prime`` for Alice up to the cap ``p + eps``;
    the default takes the cap itself. Raises ``CapViolatedError`` above it.
    """
    spec = WcfSpec(1.0 - p, eps)
    if psi_l.dims != psi_w.dims:
        raise InvariantViolationError("branch states live on different registers")
    if p_prime is None:
        p_prime = min(p + eps, 1.0)
    if p_prime > p + eps + tols.cap_slack:
        raise CapViolatedError(
            f"p'={p_prime!r} above the receiver cap {spec.bob_cap!r}"
        )
    if not 0.0 <= p_prime <= 1.0:
        raise OutOfRangeError(f"p'={p_prime!r} outside [0, 1]")
    dims = (2,) + psi_l.dims
    amp = np.zeros(int(np.prod(dims)), dtype=complex)
    block = int(np.prod(psi_l.dims))
    amp[LOSE * block:(LOSE + 1) * block] = math.sqrt(p_prime) * psi_l.amplitudes
    amp[WIN * block:(WIN + 1) * block] = math.sqrt(1.0 - p_prime) * psi_w.amplitudes
    return WcfJointState(p_prime, PureState(dims, amp, tols=tols), tols=tols)


WIN_TERMINAL = "win_terminal"
LOSE_TERMINAL = "lose_terminal"


@dataclass(frozen=True)
class CompositionTree:
    """Cascade of balanced flips realizing an unbalanced target.

    Each level plays one balanced flip; one outcome ends the game, the other
    recurses, following the binary expansion of the target. ``levels`` lists,
    root first, which outcome is terminal; ``final`` resolves the branch left
    open at the bottom. ``x`` is the exactly achieved honest win probability.
    """

    z: float
    depth: int
    levels: tuple[str, ...]
    final: str
    x: Fraction

    def __post_init__(self):
        if abs(self.x - Fraction(self.z)) > Fraction(1, 2 ** self.depth):
            raise InvariantViolationError(
                f"achieved probability {self.x} further than 2^-{self.depth} from the target"
            )


def unbalanced_compose(z: float, k: int) -> CompositionTree:
    """Build the depth-``k`` cascade for target win probability ``z``.

    Exact dyadic arithmetic throughout: the achieved probability ``x``
    satisfies |x - z| <= 2^-k as rationals.
    """
    if not 0.0 <= z <= 1.0:
        raise OutOfRangeError(f"z={z!r} outside [0, 1]")
    if not isinstance(k, int) or k < 1:
        raise BadDepthError(f"depth {k!r} must be a positive integer")
    half = Fraction(1, 2)
    target = Fraction(z)
    levels = []
    for _ in range(k):
        if target >= half:
            levels.append(WIN_TERMINAL)
            target = 2 * target - 1
        else:
            levels.append(LOSE_TERMINAL)
            target = 2 * target
    final = "win" if target >= half else "lose"

    achieved = Fraction(1 if final == "win" else 0)
    for level in reversed(levels):
        if level == WIN_TERMINAL:
            achieved = half + half * achieved
        else:
            achieved = half * achieved
    tree = CompositionTree(z=z, depth=k, levels=tuple(levels), final=final, x=achieved)
    if abs(achieved - Fraction(z)) > Fraction(1, 2 ** k):
        raise CrossCheckError("compose_accuracy", float(achieved), z)
    return tree


def composed_cheat_values(
    tree: CompositionTree, eps: float, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Fraction, Fraction]:
    """Exact optimal adversary values for the cascade, by dynamic programming.

    Each single flip can be biased by its cheater to probability 1/2 + eps
    toward whichever child serves them; the honest opponent contributes no
    defense beyond the primitive's cap. Both values are computed bottom-up in
    exact rational arithmetic and verified against the composed security
    targets: the committer at most ``x + 2 eps``, the receiver at most
    ``(1 - x) + 2 eps``, both up to ``compose_slack``.
    """
    if eps < 0.0 or eps > 0.5:
        raise OutOfRangeError(f"eps={eps!r} outside [0, 1/2]")
    half = Fraction(1, 2)
    shift = Fraction(eps)
    up, down = half + shift, half - shift

    alice = Fraction(1 if tree.final == "win" else 0)
    bob = 1 - alice
    honest = alice
    for level in reversed(tree.levels):
        if level == WIN_TERMINAL:
            # terminal child is an Alice win
            alice = up * 1 + down * alice
            bob = up * bob  # Bob prefers the recursing child
            honest = half + half * honest
        else:
            alice = up * alice
            bob = up * 1 + down * bob
            honest = half * honest

    if honest != tree.x:
        raise CrossCheckError("compose_honest_value", float(honest), float(tree.x))
    slack = Fraction(tols.compose_slack)
    if alice > tree.x + 2 * shift + slack:
        raise CrossCheckError("compose_committer_cap", float(alice), float(tree.x + 2 * shift))
    if bob > (1 - tree.x) + 2 * shift + slack:
        raise CrossCheckError("compose_receiver_cap", float(bob), float(1 - tree.x + 2 * shift))
    return alice, bob
