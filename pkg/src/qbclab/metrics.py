"""Distinguishability measures, optimal measurements, and channels.

The functions here verify their own headline identities where two independent
routes exist (double entry style) and raise ``CrossCheckError`` on
disagreement; the package treats such checks as part of the computation, not
as optional debugging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    CrossCheckError,
    DimMismatchError,
    InvalidChannelError,
    InvariantViolationError,
    LengthMismatchError,
)
from .qmat import DensityMatrix, PureState, as_complex_matrix, hermitian_eig, matrix_sqrt_psd
from .tolerances import DEFAULT_TOLS, Tolerances


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector; entries in [-floor, 0) are clipped to zero."""

    probabilities: np.ndarray
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if p.size and p.min() < -self.tols.distribution_floor:
            raise InvariantViolationError(f"probability {p.min():.3e} below the floor")
        p = np.clip(p, 0.0, None)
        total = float(p.sum())
        if abs(total - 1.0) > self.tols.distribution_sum:
            raise InvariantViolationError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __len__(self) -> int:
        return self.probabilities.size


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite measurement: PSD effects summing to the identity."""

    effects: tuple[np.ndarray, ...]
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        effects = tuple(as_complex_matrix(e) for e in self.effects)
        if not effects:
            raise InvariantViolationError("a measurement needs at least one effect")
        dim = effects[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        frozen = []
        for e in effects:
            if e.shape[0] != dim:
                raise DimMismatchError("effects of mixed dimensions")
            low = float(np.linalg.eigvalsh((e + e.conj().T) / 2)[0])
            if low < -self.tols.povm_effect_psd or np.max(np.abs(e - e.conj().T)) > self.tols.povm_effect_psd:
                raise InvariantViolationError("effect is not PSD within tolerance")
            total += e
            g = np.array(e)
            g.setflags(write=False)
            frozen.append(g)
        if np.max(np.abs(total - np.eye(dim))) > self.tols.povm_sum_identity:
            raise InvariantViolationError("effects do not sum to the identity")
        object.__setattr__(self, "effects", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass(frozen=True, eq=False)
class Channel:
    """Completely positive trace preserving map, stored by its action on matrix units.

    ``action[i, j]`` is the image of |i><j|. Validation builds the Choi matrix
    and checks positivity (complete positivity) and the trace conditions.
    """

    action: np.ndarray
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        arr = np.asarray(self.action, dtype=complex)
        if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3]:
            raise InvalidChannelError(f"action has shape {arr.shape}, expected (n, n, m, m)")
        n, _, m, _ = arr.shape
        choi = np.transpose(arr, (0, 2, 1, 3)).reshape(n * m, n * m)
        if np.max(np.abs(choi - choi.conj().T)) > self.tols.choi_psd:
            raise InvalidChannelError("Choi matrix is not Hermitian within tolerance")
        low = float(np.linalg.eigvalsh((choi + choi.conj().T) / 2)[0])
        if low < -self.tols.choi_psd:
            raise InvalidChannelError(f"Choi eigenvalue {low:.3e}; map is not completely positive")
        traces = np.einsum("ijkk->ij", arr)
        if np.max(np.abs(traces - np.eye(n))) > self.tols.channel_trace_preserving:
            raise InvalidChannelError("map is not trace preserving within tolerance")
        arr = np.array(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "action", arr)

    @property
    def in_dim(self) -> int:
        return self.action.shape[0]

    @property
    def out_dim(self) -> int:
        return self.action.shape[2]


def identity_channel(dim: int, tols: Tolerances = DEFAULT_TOLS) -> Channel:
    action = np.zeros((dim, dim, dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            action[i, j, i, j] = 1.0
    return Channel(action, tols=tols)


def channel_from_kraus(kraus: Sequence[np.ndarray], tols: Tolerances = DEFAULT_TOLS) -> Channel:
    """Build a channel from Kraus operators (used heavily by the tests)."""
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    action = np.einsum("mki,mlj->ijkl", np.stack(ops), np.stack([k.conj() for k in ops]))
    return Channel(action, tols=tols)


def apply_channel(channel: Channel, rho: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Image of ``rho`` under the channel, revalidated as a state."""
    if rho.dim != channel.in_dim:
        raise DimMismatchError(f"state dim {rho.dim} vs channel input dim {channel.in_dim}")
    out = np.einsum("ij,ijkl->kl", rho.matrix, channel.action)
    return DensityMatrix(out, tols=tols)


ArrayLike = Union[Distribution, Sequence[float], np.ndarray]


def _probs(p: ArrayLike) -> np.ndarray:
    if isinstance(p, Distribution):
        return p.probabilities
    return np.asarray(p, dtype=float).reshape(-1)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Half the trace norm of the difference."""
    if rho.dim != sigma.dim:
        raise DimMismatchError(f"dimensions {rho.dim} and {sigma.dim} differ")
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.abs(w).sum())


def classical_trace_distance(p: ArrayLike, q: ArrayLike, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Total variation distance, computed three ways and cross-checked.

    The absolute-sum, one-sided-excess, and max-minus-one formulas must agree
    within ``classical_cross_check``; disagreement raises ``CrossCheckError``.
    """
    pv, qv = _probs(p), _probs(q)
    if pv.size != qv.size:
        raise LengthMismatchError(f"lengths {pv.size} and {qv.size} differ")
    absolute = 0.5 * float(np.abs(pv - qv).sum())
    one_sided = float((pv - qv)[pv >= qv].sum())
    max_sum = float(np.maximum(pv, qv).sum()) - 0.5 * float(pv.sum()) - 0.5 * float(qv.sum())
    for name, other in (("one_sided", one_sided), ("max_sum", max_sum)):
        if abs(absolute - other) > tols.classical_cross_check:
            raise CrossCheckError(f"classical_trace_distance/{name}", other, absolute)
    return absolute


def classical_fidelity(p: ArrayLike, q: ArrayLike) -> float:
    """Bhattacharyya overlap of two probability vectors."""
    pv, qv = _probs(p), _probs(q)
    if pv.size != qv.size:
        raise LengthMismatchError(f"lengths {pv.size} and {qv.size} differ")
    return float(np.sqrt(np.clip(pv, 0, None) * np.clip(qv, 0, None)).sum())


def fidelity(rho: DensityMatrix, sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Uhlmann fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))`` in [0, 1]."""
    if rho.dim != sigma.dim:
        raise DimMismatchError(f"dimensions {rho.dim} and {sigma.dim} differ")
    root = matrix_sqrt_psd(rho.matrix, tols)
    inner = root @ sigma.matrix @ root
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    value = float(np.sqrt(np.clip(w, 0.0, None)).sum())
    return min(max(value, 0.0), 1.0)


def measure(povm: Povm, rho: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> Distribution:
    """Outcome distribution of a measurement on a state."""
    if povm.dim != rho.dim:
        raise DimMismatchError(f"measurement dim {povm.dim} vs state dim {rho.dim}")
    probs = [float(np.trace(e @ rho.matrix).real) for e in povm.effects]
    return Distribution(np.array(probs), tols=tols)


def helstrom_povm(
    rho0: DensityMatrix, rho1: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Povm, float]:
    """Optimal two-outcome discrimination of equal-prior states.

    Effects project onto the nonnegative and negative eigenspaces of
    ``rho0 - rho1``; the returned guessing probability is
    ``1/2 + trace_distance/2`` and is cross-checked against the simulated
    success probability of the measurement itself.
    """
    if rho0.dim != rho1.dim:
        raise DimMismatchError(f"dimensions {rho0.dim} and {rho1.dim} differ")
    w, v = hermitian_eig(rho0.matrix - rho1.matrix, tols)
    plus = v[:, w >= 0]
    effect0 = plus @ plus.conj().T
    effect1 = np.eye(rho0.dim, dtype=complex) - effect0
    povm = Povm((effect0, effect1), tols=tols)
    guess = 0.5 + 0.5 * trace_distance(rho0, rho1, tols)
    simulated = 0.5 * float(np.trace(effect0 @ rho0.matrix).real) + 0.5 * float(
        np.trace(effect1 @ rho1.matrix).real
    )
    if abs(guess - simulated) > tols.helstrom_consistency:
        raise CrossCheckError("helstrom_guess_probability", simulated, guess)
    return povm, guess


def fidelity_povm(
    rho: DensityMatrix, sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Povm, Distribution, Distribution]:
    """Projective measurement whose outcome statistics attain the fidelity.

    Measures in the eigenbasis of the geometric-mean operator
    ``rho^{-1/2} sqrt(sqrt(rho) sigma sqrt(rho)) rho^{-1/2}`` on the support
    of ``rho`` (spectral pseudo-inverse, cutoff ``support_cutoff``); when
    ``rho`` is singular one extra effect projects onto its kernel, where the
    ``rho`` statistics vanish, so the Bhattacharyya overlap of the returned
    distributions still equals the fidelity. That identity is re-verified
    here within ``measured_fidelity_match``.
    """
    if rho.dim != sigma.dim:
        raise DimMismatchError(f"dimensions {rho.dim} and {sigma.dim} differ")
    d = rho.dim
    w, v = hermitian_eig(rho.matrix, tols)
    support = w > tols.support_cutoff
    vs = v[:, support]
    ws = w[support]

    root = (vs * np.sqrt(ws)) @ vs.conj().T
    inner = root @ sigma.matrix @ root
    mean_full = matrix_sqrt_psd(inner, tols)
    inv_root = 1.0 / np.sqrt(ws)
    reduced = (inv_root[:, None] * (vs.conj().T @ mean_full @ vs)) * inv_root[None, :]
    _, basis = hermitian_eig((reduced + reduced.conj().T) / 2, tols)

    vectors = vs @ basis
    effects = [np.outer(vectors[:, j], vectors[:, j].conj()) for j in range(vectors.shape[1])]
    kernel = np.eye(d, dtype=complex) - vs @ vs.conj().T
    if vectors.shape[1] < d:
        effects.append(kernel)
    povm = Povm(tuple(effects), tols=tols)
    p = measure(povm, rho, tols)
    q = measure(povm, sigma, tols)
    target = fidelity(rho, sigma, tols)
    achieved = classical_fidelity(p, q)
    if abs(achieved - target) > tols.measured_fidelity_match:
        raise CrossCheckError("fidelity_povm_overlap", achieved, target)
    return povm, p, q


def uhlmann_pair(
    rho: DensityMatrix, sigma: DensityMatrix, tols: Tolerances = DEFAULT_TOLS
) -> tuple[PureState, PureState]:
    """Purifications of ``rho`` and ``sigma`` on d x d whose overlap is the fidelity.

    Spectral purifications aligned by the unitary from the polar decomposition
    of the cross-Gram matrix ``sqrt(rho) sqrt(sigma)``.
    """
    if rho.dim != sigma.dim:
        raise DimMismatchError(f"dimensions {rho.dim} and {sigma.dim} differ")
    d = rho.dim
    root_rho = matrix_sqrt_psd(rho.matrix, tols)
    root_sigma = matrix_sqrt_psd(sigma.matrix, tols)
    u, _, vh = np.linalg.svd(root_rho @ root_sigma)
    align = vh.conj().T @ u.conj().T
    first = PureState((d, d), root_rho.reshape(-1), tols=tols)
    second = PureState((d, d), (root_sigma @ align).reshape(-1), tols=tols)
    overlap = abs(complex(np.vdot(first.amplitudes, second.amplitudes)))
    target = fidelity(rho, sigma, tols)
    if abs(overlap - target) > tols.uhlmann_overlap:
        raise CrossCheckError("uhlmann_overlap", overlap, target)
    return first, second
