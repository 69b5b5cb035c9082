"""Numerical laboratory for optimal quantum bit commitment.

The package has three layers. The base is exact linear algebra over small
registers plus the information measures built on it (states, channels,
trace distance, fidelity, and the measurements attaining both). On top of
that sit the analyses: the fidelity-chain verification connecting any
commitment's hiding and binding qualities, the trade-off curve with its
crossing near 0.739, the weak-coin-flip cascade, and the protocol whose
cheating values meet the curve. Alongside them, a fully classical protocol
model shows by exhaustive audit that lookup-table commitments concede 3/4
to someone. Everything self-checks: quantities reachable by two routes are
computed by both, and disagreement raises instead of returning.
"""

from .bounds import (
    SHRINK,
    AppendixInstance,
    BoundPoint,
    DerivativeReport,
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
from .classical import (
    DEFAULT_STRATEGY_CAP,
    MAX_RANDOMNESS,
    MAX_SYMBOLS,
    AuditReport,
    ClassicalProtocol,
    coin_bits,
    interleave,
    load_protocol,
    mixed_radix_decode,
    mixed_radix_encode,
    parse_transcript_key,
    protocol_from_dict,
    save_protocol,
    transcript_key,
)
from .corpus import (
    MAKERS,
    bundled,
    bundled_names,
    generate_all,
    make_adaptive_reveal,
    make_bob_gated,
    make_coin_masked,
    make_coin_or_plain,
    make_nonbinding,
    make_nonhiding,
    make_or_masked,
    tabulate,
)
from .errors import (
    BadDepthError,
    BadRankError,
    BadRegisterIndexError,
    CapViolatedError,
    ConstraintViolatedError,
    CrossCheckError,
    DegenerateKError,
    DimMismatchError,
    EpsOutOfRegimeWarning,
    EpsTooLargeWarning,
    InvalidChannelError,
    InvariantViolationError,
    LengthMismatchError,
    NoConvergenceError,
    NotHermitianError,
    NotHonestTranscriptError,
    NotPsdError,
    OutOfRangeError,
    QbclabError,
    StrategySpaceTooLargeError,
)
from .lemma import (
    ChainCheck,
    LemmaTrace,
    build_block_states,
    build_matching_channel,
    lemma_sweep,
    measured_distributions,
    verify_lemma,
)
from .metrics import (
    Channel,
    Distribution,
    Povm,
    apply_channel,
    channel_from_kraus,
    classical_fidelity,
    classical_trace_distance,
    fidelity,
    fidelity_povm,
    helstrom_povm,
    identity_channel,
    measure,
    trace_distance,
    uhlmann_pair,
)
from .protocol import (
    ESCAPE,
    CheatReport,
    CommitmentState,
    ProtocolConfig,
    baseline_protocol,
    build_omega_b,
    cheating_alice_value,
    cheating_bob_value,
    generic_attack,
    honest_run,
    simulate_alice_attack,
)
from .qmat import (
    DensityMatrix,
    PureState,
    basis_state,
    hermitian_eig,
    load_matrix_json,
    matrix_sqrt_psd,
    partial_trace,
    purify,
    random_density,
    save_matrix_json,
)
from .tolerances import DEFAULT_TOLS, Tolerances
from .wcf import (
    LOSE,
    LOSE_TERMINAL,
    WIN,
    WIN_TERMINAL,
    CompositionTree,
    WcfJointState,
    WcfSpec,
    cheating_bob_wcf_state,
    composed_cheat_values,
    ideal_wcf_state,
    unbalanced_compose,
)

__version__ = "0.1.0"

__all__ = [
    "AppendixInstance",
    "AuditReport",
    "BadDepthError",
    "BadRankError",
    "BadRegisterIndexError",
    "BoundPoint",
    "CapViolatedError",
    "ChainCheck",
    "Channel",
    "CheatReport",
    "ClassicalProtocol",
    "CommitmentState",
    "CompositionTree",
    "ConstraintViolatedError",
    "CrossCheckError",
    "DEFAULT_STRATEGY_CAP",
    "DEFAULT_TOLS",
    "DegenerateKError",
    "DensityMatrix",
    "DerivativeReport",
    "DimMismatchError",
    "Distribution",
    "ESCAPE",
    "EpsOutOfRegimeWarning",
    "EpsTooLargeWarning",
    "InvalidChannelError",
    "InvariantViolationError",
    "LOSE",
    "LOSE_TERMINAL",
    "LemmaTrace",
    "LengthMismatchError",
    "MAKERS",
    "MAX_RANDOMNESS",
    "MAX_SYMBOLS",
    "NoConvergenceError",
    "NotHermitianError",
    "NotHonestTranscriptError",
    "NotPsdError",
    "OutOfRangeError",
    "Povm",
    "ProtocolConfig",
    "PureState",
    "QbclabError",
    "SHRINK",
    "StrategySpaceTooLargeError",
    "Tolerances",
    "WIN",
    "WIN_TERMINAL",
    "WcfJointState",
    "WcfSpec",
    "alice_lower_bound",
    "analytic_maximizer",
    "appendix_derivative_checks",
    "appendix_maximize",
    "appendix_value_raw",
    "apply_channel",
    "baseline_protocol",
    "basis_state",
    "bob_lower_bound",
    "bound_curve",
    "build_block_states",
    "build_matching_channel",
    "build_omega_b",
    "bundled",
    "bundled_names",
    "channel_from_kraus",
    "cheating_alice_value",
    "cheating_bob_value",
    "cheating_bob_wcf_state",
    "classical_fidelity",
    "classical_trace_distance",
    "coin_bits",
    "composed_cheat_values",
    "eps_regime_limit",
    "fidelity",
    "fidelity_povm",
    "generate_all",
    "generic_attack",
    "helstrom_povm",
    "hermitian_eig",
    "honest_run",
    "ideal_wcf_state",
    "identity_channel",
    "interleave",
    "lemma_sweep",
    "load_matrix_json",
    "load_protocol",
    "make_adaptive_reveal",
    "make_bob_gated",
    "make_coin_masked",
    "make_coin_or_plain",
    "make_nonbinding",
    "make_nonhiding",
    "make_or_masked",
    "matrix_sqrt_psd",
    "measure",
    "measured_distributions",
    "mixed_radix_decode",
    "mixed_radix_encode",
    "parse_transcript_key",
    "partial_trace",
    "protocol_from_dict",
    "purify",
    "random_density",
    "save_matrix_json",
    "save_protocol",
    "simulate_alice_attack",
    "solve_optimal",
    "tabulate",
    "trace_distance",
    "transcript_key",
    "uhlmann_pair",
    "unbalanced_compose",
    "unconstrained_maximize",
    "verify_lemma",
]
