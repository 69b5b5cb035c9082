"""Dense complex linear algebra and state primitives for small dimensions.

Operators are plain numpy complex arrays. The wrapper types ``PureState`` and
``DensityMatrix`` validate their physical invariants once at construction and
are immutable afterwards, so values can be shared freely between threads.
Dimensions stay small (tens, not thousands); clarity beats asymptotics here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    BadRankError,
    BadRegisterIndexError,
    DimMismatchError,
    InvariantViolationError,
    NoConvergenceError,
    NotHermitianError,
    NotPsdError,
)
from .tolerances import DEFAULT_TOLS, Tolerances


def as_complex_matrix(matrix) -> np.ndarray:
    """Coerce to a square complex ndarray without copying when possible."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvariantViolationError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermitian_eig(matrix, tols: Tolerances = DEFAULT_TOLS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvector columns ``v``, so ``v @ diag(w) @ v.conj().T`` reconstructs
    the input.

    Raises:
        NotHermitianError: deviation from self-adjointness above tolerance.
        NoConvergenceError: the underlying solver did not converge.
    """
    arr = as_complex_matrix(matrix)
    if arr.size and np.max(np.abs(arr - arr.conj().T)) > tols.hermitian_input:
        raise NotHermitianError(
            f"matrix deviates from self-adjointness by "
            f"{np.max(np.abs(arr - arr.conj().T)):.3e}"
        )
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise NoConvergenceError(str(exc)) from exc
    return w, v


def matrix_sqrt_psd(matrix, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Positive semidefinite square root of a PSD matrix.

    Eigenvalues in [-psd_floor, 0) are clipped to zero; anything lower raises
    ``NotPsdError``.
    """
    w, v = hermitian_eig(matrix, tols)
    if w.size and w[0] < -tols.psd_floor:
        raise NotPsdError(f"eigenvalue {w[0]:.3e} below the PSD floor")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over a declared tuple of register dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise InvariantViolationError(f"bad register dims {dims}")
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != int(np.prod(dims)):
            raise DimMismatchError(
                f"amplitude length {amp.size} does not match dims {dims}"
            )
        norm2 = float(np.vdot(amp, amp).real)
        if abs(norm2 - 1.0) > self.tols.state_norm:
            raise InvariantViolationError(f"squared norm {norm2!r} is not 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _readonly(amp))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), tols=self.tols)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix validated at construction."""

    matrix: np.ndarray
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        arr = as_complex_matrix(self.matrix)
        tols = self.tols
        if np.max(np.abs(arr - arr.conj().T)) > tols.density_hermitian:
            raise NotHermitianError("density matrix is not Hermitian within tolerance")
        tr = float(np.trace(arr).real)
        if abs(tr - 1.0) > tols.density_trace:
            raise InvariantViolationError(f"trace {tr!r} is not 1")
        w = np.linalg.eigvalsh(arr)
        if w[0] < -tols.density_eig_floor:
            raise NotPsdError(f"eigenvalue {w[0]:.3e} below the negativity floor")
        object.__setattr__(self, "matrix", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


State = Union[PureState, DensityMatrix]


def basis_state(dims: Sequence[int], indices: Sequence[int]) -> PureState:
    """Computational basis vector |indices> over the given registers."""
    dims = tuple(int(d) for d in dims)
    amp = np.zeros(int(np.prod(dims)), dtype=complex)
    amp[int(np.ravel_multi_index(tuple(indices), dims))] = 1.0
    return PureState(dims, amp)


def partial_trace(
    state: State,
    keep: Iterable[int],
    dims: Sequence[int] | None = None,
    tols: Tolerances = DEFAULT_TOLS,
) -> DensityMatrix:
    """Reduced state on the kept registers, in their original order.

    ``PureState`` inputs carry their own register structure; ``DensityMatrix``
    inputs must declare it through ``dims``.
    """
    if isinstance(state, PureState):
        reg_dims = state.dims
    else:
        if dims is None:
            raise BadRegisterIndexError("register structure required for a density matrix")
        reg_dims = tuple(int(d) for d in dims)
        if int(np.prod(reg_dims)) != state.dim:
            raise DimMismatchError(f"dims {reg_dims} do not factor dimension {state.dim}")
    n = len(reg_dims)
    keep = tuple(int(i) for i in keep)
    if not keep or len(set(keep)) != len(keep) or any(i < 0 or i >= n for i in keep):
        raise BadRegisterIndexError(f"bad register selection {keep} for {n} registers")
    keep = tuple(sorted(keep))
    traced = tuple(i for i in range(n) if i not in keep)
    kept_dim = int(np.prod([reg_dims[i] for i in keep]))

    if isinstance(state, PureState):
        psi = state.amplitudes.reshape(reg_dims)
        if traced:
            rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
        else:
            flat = psi.reshape(-1)
            rho = np.outer(flat, flat.conj())
        return DensityMatrix(rho.reshape(kept_dim, kept_dim), tols=tols)

    arr = state.matrix.reshape(reg_dims + reg_dims)
    # trace out registers from the highest index down so axis numbers stay valid
    left = list(range(n))
    for idx in sorted(traced, reverse=True):
        pos = left.index(idx)
        arr = np.trace(arr, axis1=pos, axis2=pos + len(left))
        left.pop(pos)
    return DensityMatrix(arr.reshape(kept_dim, kept_dim), tols=tols)


def purify(rho: DensityMatrix, tols: Tolerances = DEFAULT_TOLS) -> PureState:
    """Spectral purification on system x auxiliary, auxiliary dim = rank(rho)."""
    w, v = hermitian_eig(rho.matrix, tols)
    support = [i for i in range(len(w)) if w[i] > tols.support_cutoff]
    if not support:
        raise NotPsdError("state has no support above the rank cutoff")
    d = rho.dim
    r = len(support)
    amp = np.zeros((d, r), dtype=complex)
    for j, i in enumerate(support):
        amp[:, j] = np.sqrt(w[i]) * v[:, i]
    return PureState((d, r), amp.reshape(-1), tols=tols)


def random_density(dim: int, rank: int, seed: int, tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Seeded random density matrix of the given rank.

    Partial trace of a seeded Gaussian-induced random pure state on
    dim x rank; the same seed yields the same matrix bit for bit.
    """
    dim = int(dim)
    rank = int(rank)
    if dim < 1:
        raise BadRankError(f"dimension {dim} must be positive")
    if rank < 1 or rank > dim:
        raise BadRankError(f"rank {rank} outside 1..{dim}")
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    block /= np.linalg.norm(block.reshape(-1))
    return DensityMatrix(block @ block.conj().T, tols=tols)


def save_matrix_json(path, matrix) -> None:
    """Write a matrix as ``{"dim": d, "entries": [[re, im], ...]}`` row-major."""
    arr = as_complex_matrix(matrix)
    payload = {
        "dim": int(arr.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in arr.reshape(-1)],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")


def load_matrix_json(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix_json`."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    dim = int(payload["dim"])
    entries = payload["entries"]
    if len(entries) != dim * dim:
        raise InvariantViolationError(
            f"matrix file declares dim {dim} but carries {len(entries)} entries"
        )
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(dim, dim)
