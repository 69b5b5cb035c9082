"""Constructive verification of the mixture fidelity floor.

For any pair of states ``sigma0, sigma1`` with equal mixture
``sigma_plus = (sigma0 + sigma1)/2`` the average squared fidelity to the
mixture is bounded below by a function of their trace distance ``t``:

    (F(sigma_plus, sigma0)^2 + F(sigma_plus, sigma1)^2) / 2
        >= (1 - (1 - 1/sqrt(2)) * t)^2

The proof is a chain of explicit constructions, and ``verify_lemma`` executes
every link numerically rather than trusting the algebra: block-diagonal
embeddings, the fidelity-attaining measurement, a classical coarse-graining
channel onto three-point comparison distributions, and two closed forms. Each
link is recorded as a named check in the returned trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CrossCheckError, DegenerateKError, DimMismatchError
from .metrics import (
    Channel,
    Distribution,
    apply_channel,
    classical_fidelity,
    classical_trace_distance,
    fidelity,
    fidelity_povm,
    trace_distance,
)
from .qmat import DensityMatrix, random_density
from .tolerances import DEFAULT_TOLS, Tolerances

SHRINK = 1.0 - 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class ChainCheck:
    """One verified identity or inequality: value related to bound by kind."""

    name: str
    kind: str  # "eq" or "ge"
    value: float
    bound: float
    tolerance: float

    @property
    def margin(self) -> float:
        if self.kind == "eq":
            return self.tolerance - abs(self.value - self.bound)
        return self.value - self.bound + self.tolerance

    @property
    def ok(self) -> bool:
        return self.margin >= 0.0


@dataclass(frozen=True, eq=False)
class LemmaTrace:
    """Every intermediate object of one verification run."""

    sigma0: DensityMatrix
    sigma1: DensityMatrix
    sigma_plus: DensityMatrix
    rho0: DensityMatrix
    rho_plus: DensityMatrix
    dist0: Distribution
    dist_plus: Distribution
    dist1: Optional[Distribution]
    k: float
    w: Optional[np.ndarray]
    set_a: tuple[int, ...]
    set_b: tuple[int, ...]
    t0: DensityMatrix
    t_plus: DensityMatrix
    channel: Optional[Channel]
    lhs: float
    rhs: float
    checks: tuple[ChainCheck, ...]

    @property
    def violations(self) -> tuple[ChainCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)

    @property
    def max_violation(self) -> float:
        if not self.checks:
            return 0.0
        return max(0.0, max(-c.margin for c in self.checks))

    @property
    def gap(self) -> float:
        """Observed slack of the headline inequality."""
        return self.lhs - self.rhs


def build_block_states(
    sigma0: DensityMatrix, sigma1: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> tuple[DensityMatrix, DensityMatrix]:
    """Block embeddings carrying the pair and its mixture on a doubled space.

    ``rho0`` holds sigma0 and sigma1 in orthogonal flag sectors; ``rho_plus``
    holds the mixture in both sectors. Their trace distance is half the
    original one, and their fidelity averages the two branch fidelities.
    """
    if sigma0.dim != sigma1.dim:
        raise DimMismatchError(f"dimensions {sigma0.dim} and {sigma1.dim} differ")
    d = sigma0.dim
    sigma_plus = 0.5 * (sigma0.matrix + sigma1.matrix)
    rho0 = np.zeros((2 * d, 2 * d), dtype=complex)
    rho0[:d, :d] = 0.5 * sigma0.matrix
    rho0[d:, d:] = 0.5 * sigma1.matrix
    rho_plus = np.zeros((2 * d, 2 * d), dtype=complex)
    rho_plus[:d, :d] = 0.5 * sigma_plus
    rho_plus[d:, d:] = 0.5 * sigma_plus
    return DensityMatrix(rho0, tols=tols), DensityMatrix(rho_plus, tols=tols)


def measured_distributions(
    rho0: DensityMatrix, rho_plus: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Distribution, Distribution]:
    """Statistics of the fidelity-attaining measurement on the block pair."""
    # anchor the measurement on rho_plus, whose support contains rho0's
    _, plus_stats, zero_stats = fidelity_povm(rho_plus, rho0, tols)
    return zero_stats, plus_stats


def build_matching_channel(
    dist0: Distribution, dist_plus: Distribution, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Channel, Distribution, float]:
    """Classical channel carrying three-point comparison states onto the data.

    With ``p = dist0`` and ``q = dist_plus`` define ``r = 2q - p`` (a
    distribution, clipped at the floor), the gap ``k`` as twice the total
    variation between p and q, the gain set A = {p >= r} and loss set
    B = {p < r}, and overlap weights ``w = min(p, r)``. The returned channel
    maps the three-point states diag(k, 0, 1-k) and diag(k/2, k/2, 1-k)
    exactly onto p and q.

    Raises ``DegenerateKError`` when k is below ``degenerate_k`` (the
    distributions coincide and no channel is needed). When ``1 - k`` is below
    the same threshold, k is snapped to exactly 1; the third input state then
    has zero weight and its image is an arbitrary completion (the image of
    the first), leaving both matching identities exact.
    """
    p = dist0.probabilities
    q = dist_plus.probabilities
    if p.size != q.size:
        raise DimMismatchError(f"lengths {p.size} and {q.size} differ")
    r = Distribution(2.0 * q - p, tols=tols).probabilities
    gain = p >= r
    loss = ~gain
    k_gain = float((p[gain] - r[gain]).sum())
    k_loss = float((r[loss] - p[loss]).sum())
    k = k_gain

    if k < tols.degenerate_k:
        raise DegenerateKError(k)

    m = p.size
    action = np.zeros((3, 3, m, m), dtype=complex)
    col0 = np.zeros(m)
    col1 = np.zeros(m)
    col0[gain] = (p[gain] - r[gain]) / k_gain
    if k_loss > 0.0:
        col1[loss] = (r[loss] - p[loss]) / k_loss
    else:  # k == 0 was excluded, so this cannot happen with k_gain > 0
        col1[:] = col0
    w = np.minimum(p, r)
    w_sum = float(w.sum())
    if 1.0 - k < tols.degenerate_k:
        k = 1.0
        col2 = col0.copy()
        w = np.zeros(m)
        w_sum = 0.0
    else:
        col2 = w / w_sum
    action[0, 0][np.diag_indices(m)] = col0
    action[1, 1][np.diag_indices(m)] = col1
    action[2, 2][np.diag_indices(m)] = col2
    channel = Channel(action, tols=tols)

    # double entry on the gap: both one-sided sums and the distance route
    distance_route = 2.0 * classical_trace_distance(p, q, tols)
    for name, other in (("loss_side", k_loss), ("distance_route", distance_route)):
        if abs(k_gain - other) > tols.weight_balance:
            raise CrossCheckError(f"matching_channel_gap/{name}", other, k_gain)

    dist1 = Distribution(r, tols=tols)
    return channel, dist1, k


def _three_point(k: float, split: bool, tols: Tolerances) -> DensityMatrix:
    if split:
        diag = np.array([k / 2.0, k / 2.0, 1.0 - k])
    else:
        diag = np.array([k, 0.0, 1.0 - k])
    return DensityMatrix(np.diag(np.clip(diag, 0.0, None)).astype(complex), tols=tols)


def verify_lemma(
    sigma0: DensityMatrix,
    sigma1: DensityMatrix,
    tols: Tolerances = DEFAULT_TOLS,
    strict: bool = True,
) -> LemmaTrace:
    """Run the full verification chain on one pair of states.

    Checks performed, in order: the block-embedding distance and fidelity
    identities, the Cauchy-Schwarz step, the measurement attaining the block
    fidelity, monotonicity of the distance under measurement, the matching
    channel identities, the closed form for the three-point fidelity, the
    data-processing comparison, and the headline inequality. With
    ``strict=True`` any failed check raises ``CrossCheckError``; the trace is
    always available on the exception as ``exc.trace``.
    """
    checks: list[ChainCheck] = []

    def eq(name: str, value: float, bound: float, tolerance: float) -> None:
        checks.append(ChainCheck(name, "eq", value, bound, tolerance))

    def ge(name: str, value: float, bound: float, tolerance: float) -> None:
        checks.append(ChainCheck(name, "ge", value, bound, tolerance))

    sigma_plus = DensityMatrix(0.5 * (sigma0.matrix + sigma1.matrix), tols=tols)
    t = trace_distance(sigma0, sigma1, tols)
    fid0 = fidelity(sigma_plus, sigma0, tols)
    fid1 = fidelity(sigma_plus, sigma1, tols)
    lhs = 0.5 * (fid0 * fid0 + fid1 * fid1)
    rhs_root = 1.0 - SHRINK * t
    rhs = rhs_root * rhs_root

    rho0, rho_plus = build_block_states(sigma0, sigma1, tols)
    eq("block_distance_identity", trace_distance(rho0, rho_plus, tols), 0.5 * t, tols.distance_identity)
    block_fid = fidelity(rho0, rho_plus, tols)
    eq("block_fidelity_identity", block_fid, 0.5 * (fid0 + fid1), tols.fidelity_identity)
    ge("cauchy_schwarz", lhs, block_fid * block_fid, tols.fidelity_identity)

    dist0, dist_plus = measured_distributions(rho0, rho_plus, tols)
    measured_fid = classical_fidelity(dist0, dist_plus)
    eq("measurement_attains_fidelity", measured_fid, block_fid, tols.measured_fidelity_match)
    measured_dist = classical_trace_distance(dist0, dist_plus, tols)
    ge("distance_monotone_under_measurement", trace_distance(rho0, rho_plus, tols), measured_dist, tols.channel_image)

    channel: Optional[Channel] = None
    dist1: Optional[Distribution] = None
    w: Optional[np.ndarray] = None
    set_a: tuple[int, ...] = ()
    set_b: tuple[int, ...] = ()
    try:
        channel, dist1, k = build_matching_channel(dist0, dist_plus, tols)
    except DegenerateKError:
        k = 0.0
        eq("degenerate_distributions", measured_dist, 0.0, tols.degenerate_k * 10)
    else:
        p = dist0.probabilities
        r = dist1.probabilities
        gain = p >= r
        set_a = tuple(int(i) for i in np.flatnonzero(gain))
        set_b = tuple(int(i) for i in np.flatnonzero(~gain))
        w = np.minimum(p, r)
        if 1.0 - k > 0.0:
            eq("overlap_weight_total", float(w.sum()), 1.0 - k, tols.weight_balance)

    t0 = _three_point(k, split=False, tols=tols)
    t_plus = _three_point(k, split=True, tols=tols)
    if channel is not None:
        image0 = apply_channel(channel, t0, tols)
        image_plus = apply_channel(channel, t_plus, tols)
        eq(
            "channel_matches_first",
            float(np.max(np.abs(image0.matrix - np.diag(dist0.probabilities)))),
            0.0,
            tols.channel_image,
        )
        eq(
            "channel_matches_mixture",
            float(np.max(np.abs(image_plus.matrix - np.diag(dist_plus.probabilities)))),
            0.0,
            tols.channel_image,
        )

    closed_form = 1.0 - k + k / math.sqrt(2.0)
    eq("three_point_closed_form", fidelity(t0, t_plus, tols), closed_form, tols.fidelity_symmetry)
    ge("data_processing_comparison", measured_fid, closed_form, tols.chain_slack)
    ge("gap_within_distance", t, k, tols.channel_image)
    ge("three_point_floor", closed_form, rhs_root, tols.chain_slack)
    ge("headline_inequality", lhs, rhs, tols.chain_slack)

    trace = LemmaTrace(
        sigma0=sigma0,
        sigma1=sigma1,
        sigma_plus=sigma_plus,
        rho0=rho0,
        rho_plus=rho_plus,
        dist0=dist0,
        dist_plus=dist_plus,
        dist1=dist1,
        k=k,
        w=w,
        set_a=set_a,
        set_b=set_b,
        t0=t0,
        t_plus=t_plus,
        channel=channel,
        lhs=lhs,
        rhs=rhs,
        checks=tuple(checks),
    )
    if strict and trace.violations:
        worst = min(trace.violations, key=lambda c: c.margin)
        error = CrossCheckError(f"lemma/{worst.name}", worst.value, worst.bound)
        error.trace = trace
        raise error
    return trace


def lemma_sweep(
    trials: int,
    dims: tuple[int, ...] = (2, 3, 4),
    seed: int = 0,
    tols: Tolerances = DEFAULT_TOLS,
) -> dict:
    """Monte Carlo sweep over seeded random pairs with mixed ranks.

    Returns summary statistics and a serialized list of violating instances;
    each entry carries the seeds needed to replay it exactly.
    """
    violations = []
    min_gap = float("inf")
    max_violation = 0.0
    count = 0
    for d in dims:
        for trial in range(trials):
            seed0 = seed + 2 * (trial + trials * d)
            seed1 = seed0 + 1
            rank0 = 1 + (trial % d)
            rank1 = 1 + ((trial // d) % d)
            sigma0 = random_density(d, rank0, seed0, tols)
            sigma1 = random_density(d, rank1, seed1, tols)
            trace = verify_lemma(sigma0, sigma1, tols, strict=False)
            count += 1
            min_gap = min(min_gap, trace.gap)
            max_violation = max(max_violation, trace.max_violation)
            for check in trace.violations:
                violations.append(
                    {
                        "dim": d,
                        "rank0": rank0,
                        "rank1": rank1,
                        "seed0": seed0,
                        "seed1": seed1,
                        "check": check.name,
                        "value": check.value,
                        "bound": check.bound,
                        "margin": check.margin,
                    }
                )
    return {
        "pairs": count,
        "dims": list(dims),
        "min_gap": min_gap,
        "max_violation": max_violation,
        "violations": violations,
    }
