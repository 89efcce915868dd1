"""Finite-sample device-independent quantum private query.

Local CHSH certification of the shared pairs, Chernoff-Hoeffding and Serfling
sample-size bounds, Alice's biased-state attacks, and a seeded simulator of the
certify-then-establish-key protocol.
"""

from ._checks import DomainError
from .adversary import (
    AdversaryConfig,
    additional_leakage,
    attack_sweep,
    bias_threshold_exact,
    bias_threshold_paper,
    bias_threshold_partial,
    leakage_fraction,
    leakage_gain,
    mixture_success_probability,
)
from .bounds import (
    acceptance_interval,
    chernoff_sample_size,
    chsh_deviation_delta,
    qpq_deviation_nu,
    sample_size_sweep,
    serfling_corollary_deviation,
    serfling_tail,
)
from .chsh import (
    GameAngles,
    optimal_angles,
    oracle_success_probability,
    p_max,
    pmax_curve,
    success_probability,
    success_probability_biased,
)
from .protocol import (
    KeyTranscript,
    MonteCarloSummary,
    ProtocolParams,
    RoundRecord,
    Transcript,
    chsh_round,
    evaluate_test,
    monte_carlo_summary,
    partition_states,
    qpq_key_phase,
    run_protocol,
    verify_theorem1,
)
from .states import (
    OutcomeDistribution,
    ProjectiveBasis,
    RngStream,
    TwoQubitState,
    basis_from_angle,
    joint_distribution,
    make_biased_state,
    make_honest_state,
    sample_outcome,
)

__version__ = "0.1.0"
