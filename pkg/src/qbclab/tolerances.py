"""Central numerical tolerance configuration.

Every comparison threshold used by the package lives in one frozen record so
that a run can tighten or relax them coherently. Functions take a
``Tolerances`` keyword defaulting to ``DEFAULT_TOLS``; nothing hardcodes a
threshold inline.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # linear algebra plumbing
    hermitian_input: float = 1e-8
    eig_reconstruction: float = 1e-9
    orthonormality: float = 1e-9
    sqrt_product: float = 1e-8
    psd_floor: float = 1e-10
    support_cutoff: float = 1e-10

    # state and register types
    state_norm: float = 1e-10
    density_hermitian: float = 1e-10
    density_trace: float = 1e-10
    density_eig_floor: float = 1e-10
    partial_trace_roundtrip: float = 1e-9
    reduced_state_match: float = 1e-10

    # measurements, channels, distributions
    povm_effect_psd: float = 1e-9
    povm_sum_identity: float = 1e-8
    choi_psd: float = 1e-8
    channel_trace_preserving: float = 1e-9
    distribution_floor: float = 1e-12
    distribution_sum: float = 1e-9
    classical_cross_check: float = 1e-12
    fidelity_symmetry: float = 1e-8
    helstrom_consistency: float = 1e-9
    measured_fidelity_match: float = 1e-7
    uhlmann_overlap: float = 1e-7
    uhlmann_reduced: float = 1e-8

    # inequality chain
    distance_identity: float = 1e-8
    fidelity_identity: float = 1e-7
    channel_image: float = 1e-9
    chain_slack: float = 1e-7
    degenerate_k: float = 1e-12
    weight_balance: float = 1e-9

    # scalar bounds and optimization
    bisection_residual: float = 1e-12
    closed_form: float = 1e-12
    derivative_location: float = 1e-4

    # coin flipping and composition
    cap_slack: float = 1e-12
    compose_slack: float = 1e-12

    # commitment protocol
    honest_accept: float = 1e-12
    bob_value_match: float = 1e-9
    attack_fidelity_match: float = 1e-7
    attack_formula_match: float = 1e-6
    witness_floor: float = 0.7393
    witness_slack: float = 1e-6

    def replaced(self, **overrides: float) -> "Tolerances":
        """Copy with the named thresholds overridden."""
        return dataclasses.replace(self, **overrides)


DEFAULT_TOLS = Tolerances()
