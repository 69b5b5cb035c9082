"""Scalar cheat-probability bounds and the constrained reveal maximization.

Two curves meet at the optimum: the committer's best cheating probability
falls with the distinguishability ``t`` of the two commitment states as
``(1 - (1 - 1/sqrt(2)) t)^2`` while the receiver's rises as ``(1 + t)/2``.
Their crossing pins the protocol-independent floor near 0.739.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConstraintViolatedError, CrossCheckError, EpsTooLargeWarning, OutOfRangeError
from .tolerances import DEFAULT_TOLS, Tolerances

SHRINK = 1.0 - 1.0 / math.sqrt(2.0)


def alice_lower_bound(t: float) -> float:
    """Committer cheat floor as a function of state distinguishability."""
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"t={t!r} outside [0, 1]")
    root = 1.0 - SHRINK * t
    return root * root


def bob_lower_bound(t: float) -> float:
    """Receiver cheat value by optimal discrimination."""
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"t={t!r} outside [0, 1]")
    return 0.5 * (1.0 + t)


@dataclass(frozen=True)
class BoundPoint:
    t: float
    alice: float
    bob: float


def bound_curve(step: float = 1e-3) -> list[BoundPoint]:
    """Both curves sampled on a uniform grid over [0, 1]."""
    if step <= 0.0:
        raise OutOfRangeError(f"step {step!r} must be positive")
    count = int(round(1.0 / step))
    ts = [min(1.0, i * step) for i in range(count + 1)]
    return [BoundPoint(t, alice_lower_bound(t), bob_lower_bound(t)) for t in ts]


def solve_optimal(tols: Tolerances = DEFAULT_TOLS) -> tuple[float, float]:
    """Distinguishability and value where the two bounds are equal.

    Bisection on the difference of the curves, run to a residual below
    ``bisection_residual``; the curves cross exactly once on (0, 1).
    """

    def gap(t: float) -> float:
        return alice_lower_bound(t) - bob_lower_bound(t)

    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = gap(mid)
        if abs(value) < tols.bisection_residual:
            break
        if value > 0.0:
            lo = mid
        else:
            hi = mid
    else:  # pragma: no cover - 200 halvings always reach the residual
        raise CrossCheckError("solve_optimal_residual", gap(mid), 0.0)
    return mid, bob_lower_bound(mid)


@dataclass(frozen=True)
class AppendixInstance:
    """Feasible point of the constrained reveal maximization.

    Variables are the diagonal weights the committer may place on the two
    openings and the escape symbol; feasibility requires nonnegativity,
    total weight at most one, and the escape weight capped at ``1 - p + eps``.
    """

    p: float
    eps: float
    r0: float
    r1: float
    r2: float
    value: Optional[float] = None
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        slack = self.tols.cap_slack
        if not 0.0 < self.p < 1.0:
            raise OutOfRangeError(f"p={self.p!r} outside (0, 1)")
        if self.eps < 0.0:
            raise OutOfRangeError(f"eps={self.eps!r} negative")
        for name, r in (("r0", self.r0), ("r1", self.r1), ("r2", self.r2)):
            if r < -slack:
                raise ConstraintViolatedError(f"{name}={r!r} negative")
        if self.r0 + self.r1 + self.r2 > 1.0 + slack:
            raise ConstraintViolatedError(f"weights sum to {self.r0 + self.r1 + self.r2!r} > 1")
        if self.r2 > 1.0 - self.p + self.eps + slack:
            raise ConstraintViolatedError(f"r2={self.r2!r} above the cap {1.0 - self.p + self.eps!r}")
        expected = appendix_value_raw(self.p, self.r0, self.r1, self.r2)
        if self.value is None:
            object.__setattr__(self, "value", expected)
        elif abs(self.value - expected) > self.tols.closed_form:
            raise ConstraintViolatedError(
                f"stored value {self.value!r} disagrees with recomputation {expected!r}"
            )


def appendix_value_raw(p: float, r0: float, r1: float, r2: float) -> float:
    """Average squared branch overlap for diagonal reveal weights."""
    a = math.sqrt(max(p * r0, 0.0)) + math.sqrt(max((1.0 - p) * r2, 0.0))
    b = math.sqrt(max(p * r1, 0.0)) + math.sqrt(max((1.0 - p) * r2, 0.0))
    return 0.5 * (a * a + b * b)


def appendix_value(inst: AppendixInstance) -> float:
    return float(inst.value)


def eps_regime_limit(p: float) -> float:
    """Largest slack for which the analytic maximizer stays valid."""
    return p * (1.0 - 1.0 / (2.0 - p))


def analytic_maximizer(p: float, eps: float, tols: Tolerances = DEFAULT_TOLS) -> AppendixInstance:
    """Closed-form argmax: both openings share ``p - eps``, escape at the cap."""
    return AppendixInstance(p=p, eps=eps, r0=(p - eps) / 2.0, r1=(p - eps) / 2.0,
                            r2=1.0 - p + eps, tols=tols)


def _grid_values(p: float, r2_cap: float, step: float) -> tuple[float, float, float, float]:
    """Vectorized grid maximum over the simplex r0 + r1 + r2 = 1, r2 <= cap."""
    r2_vals = np.arange(0.0, min(1.0, r2_cap) + step / 2.0, step)
    r2_vals = np.clip(r2_vals, 0.0, min(1.0, r2_cap))
    if r2_vals.size == 0 or r2_vals[-1] < min(1.0, r2_cap) - step / 2.0:
        r2_vals = np.append(r2_vals, min(1.0, r2_cap))
    best = (-1.0, 0.0, 0.0, 0.0)
    for r2 in r2_vals:
        budget = 1.0 - r2
        r0 = np.arange(0.0, budget + step / 2.0, step)
        r0 = np.clip(r0, 0.0, budget)
        r1 = budget - r0
        term = math.sqrt((1.0 - p) * r2)
        a = np.sqrt(p * r0) + term
        b = np.sqrt(p * r1) + term
        vals = 0.5 * (a * a + b * b)
        idx = int(np.argmax(vals))
        if vals[idx] > best[0]:
            best = (float(vals[idx]), float(r0[idx]), float(r1[idx]), float(r2))
    return best


def appendix_maximize(
    p: float, eps: float, grid_step: float = 1e-3, tols: Tolerances = DEFAULT_TOLS
) -> AppendixInstance:
    """Grid-search argmax of the reveal maximization under the escape cap.

    When ``eps`` lies inside the proven regime the analytic maximizer must
    score at least the grid maximum minus twice the grid step; outside the
    regime an ``EpsTooLargeWarning`` is emitted and no optimality assertion
    is made.
    """
    if not 0.0 < p < 1.0:
        raise OutOfRangeError(f"p={p!r} outside (0, 1)")
    if eps < 0.0 or grid_step <= 0.0:
        raise OutOfRangeError("eps must be nonnegative and grid_step positive")
    value, r0, r1, r2 = _grid_values(p, 1.0 - p + eps, grid_step)
    argmax = AppendixInstance(p=p, eps=eps, r0=r0, r1=r1, r2=r2, tols=tols)
    in_regime = eps < eps_regime_limit(p)
    if in_regime:
        analytic = analytic_maximizer(p, eps, tols)
        if analytic.value < value - 2.0 * grid_step:
            raise CrossCheckError("appendix_analytic_vs_grid", float(analytic.value), value)
    else:
        warnings.warn(
            f"eps={eps!r} outside the proven regime for p={p!r}; skipping the optimality check",
            EpsTooLargeWarning,
        )
    return argmax


def unconstrained_maximize(
    p: float, grid_step: float = 1e-3, tols: Tolerances = DEFAULT_TOLS
) -> AppendixInstance:
    """Same grid search without the escape cap (the whole simplex is feasible)."""
    if not 0.0 < p < 1.0:
        raise OutOfRangeError(f"p={p!r} outside (0, 1)")
    value, r0, r1, r2 = _grid_values(p, 1.0, grid_step)
    # eps = p raises the escape cap to exactly 1, disabling it
    return AppendixInstance(p=p, eps=p, r0=r0, r1=r1, r2=r2, tols=tols)


@dataclass(frozen=True)
class DerivativeReport:
    """Finite-difference sign-change locations versus their predictions."""

    p: float
    eps: float
    split_flip: float
    split_flip_expected: float
    escape_flip: float
    escape_flip_expected: float
    split_within_tol: bool
    escape_within_tol: bool
    split_sign_pattern: tuple[int, ...]
    escape_sign_pattern: tuple[int, ...]


def _derivative_flip(func, lo: float, hi: float, h: float) -> tuple[float, tuple[int, ...]]:
    """Bisect the sign change of a central finite-difference derivative."""

    def deriv(x: float) -> float:
        return (func(x + h) - func(x - h)) / (2.0 * h)

    samples = np.linspace(lo, hi, 33)
    signs = tuple(int(np.sign(deriv(float(x)))) for x in samples)
    a, b = lo, hi
    da = deriv(a)
    if da <= 0.0:
        return lo, signs
    for _ in range(80):
        mid = 0.5 * (a + b)
        if deriv(mid) > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b), signs


def appendix_derivative_checks(
    p: float, eps: float = 0.0, tols: Tolerances = DEFAULT_TOLS
) -> DerivativeReport:
    """Locate both predicted stationary points by finite differences.

    The split objective (escape weight fixed at its cap, varying the first
    opening weight) peaks at half the remaining budget; the escape objective
    (openings split evenly, varying the escape weight) switches sign at
    ``1 - p/(2 - p)``.
    """
    if not 0.0 < p < 1.0:
        raise OutOfRangeError(f"p={p!r} outside (0, 1)")
    budget = p - eps
    if budget <= 0.0:
        raise OutOfRangeError(f"eps={eps!r} exhausts the opening budget for p={p!r}")
    r2 = 1.0 - p + eps
    h = 1e-7

    def split_objective(r0: float) -> float:
        return appendix_value_raw(p, r0, budget - r0, r2)

    margin = max(10 * h, 1e-4 * budget)
    split_flip, split_signs = _derivative_flip(split_objective, margin, budget - margin, h)
    split_expected = budget / 2.0

    def escape_objective(x: float) -> float:
        return appendix_value_raw(p, (1.0 - x) / 2.0, (1.0 - x) / 2.0, x)

    escape_flip, escape_signs = _derivative_flip(escape_objective, margin, 1.0 - margin, h)
    escape_expected = 1.0 - p / (2.0 - p)

    return DerivativeReport(
        p=p,
        eps=eps,
        split_flip=split_flip,
        split_flip_expected=split_expected,
        escape_flip=escape_flip,
        escape_flip_expected=escape_expected,
        split_within_tol=abs(split_flip - split_expected) <= tols.derivative_location,
        escape_within_tol=abs(escape_flip - escape_expected) <= tols.derivative_location,
        split_sign_pattern=split_signs,
        escape_sign_pattern=escape_signs,
    )
