"""Finite-sample DI-QPQ protocol: partition, local CHSH certification, key phase.

Every run is keyed by ``(seed, stream_id)``. Inside a run the randomness is
split into labelled substreams so that the partition, the CHSH inputs, the
measurement outcomes and Alice's key-phase choices never share a generator:

    0  placement of the biased pairs (r-of-n attack)
    1  CHSH / QPQ partition
    2  CHSH inputs (x, y)
    3  CHSH outcomes
    4  key phase (4.0 Alice's basis, 4.1 joint outcome)

Monte Carlo trial ``t`` uses ``stream_id = t``, so results do not depend on the
order in which trials execute.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from ._checks import DomainError, check_count, check_open_unit, check_tail, check_theta
from .adversary import AdversaryConfig
from .bounds import (
    DEFAULT_EPS_CHSH,
    DEFAULT_EPS_QPQ,
    acceptance_interval,
    chernoff_sample_size,
    qpq_deviation_nu,
)
from .chsh import FIRST_QUBIT_ANGLES, GameAngles, optimal_angles, p_max, round_distributions
from .states import (
    RngStream,
    TwoQubitState,
    basis_from_angle,
    cumulative,
    joint_distribution,
    make_biased_state,
    make_honest_state,
    outcome_index,
    sample_outcome,
)

ACCEPT = "accept"
ABORT = "abort"
INCONCLUSIVE = -1


@dataclass(frozen=True)
class ProtocolParams:
    theta: float
    epsilon: float
    gamma: float
    eps_chsh: float
    eps_qpq: float
    n: int
    m: int

    def __post_init__(self):
        check_theta(self.theta)
        check_open_unit("epsilon", self.epsilon)
        check_tail("gamma", self.gamma)
        check_tail("eps_chsh", self.eps_chsh)
        check_tail("eps_qpq", self.eps_qpq)
        check_count("m", self.m)
        check_count("n", self.n)
        if self.m >= self.n:
            raise DomainError(f"test set must be smaller than the pool (m={self.m}, n={self.n})")
        if self.n > 2 * self.m:
            warnings.warn(
                f"n={self.n} exceeds 2m={2 * self.m}; a pool this large lets a "
                "partial-bias adversary raise her undetectable bias",
                stacklevel=3,
            )

    @classmethod
    def create(
        cls,
        theta: float,
        epsilon: float = 0.01,
        gamma: float = 0.01,
        eps_chsh: float = DEFAULT_EPS_CHSH,
        eps_qpq: float = DEFAULT_EPS_QPQ,
        m: Optional[int] = None,
        n: Optional[int] = None,
    ) -> "ProtocolParams":
        """Fill in m = m_opt(epsilon, gamma, p_max(theta)) and n = 2m when omitted."""
        if m is None:
            m = chernoff_sample_size(epsilon, gamma, p_max(theta))
        if n is None:
            n = 2 * m
        return cls(theta, epsilon, gamma, eps_chsh, eps_qpq, int(n), int(m))

    @property
    def angles(self) -> GameAngles:
        return optimal_angles(self.theta)

    @property
    def p_max(self) -> float:
        return p_max(self.theta)

    @property
    def interval(self) -> tuple[float, float]:
        return acceptance_interval(self.theta, self.epsilon)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "eps_chsh": self.eps_chsh,
            "eps_qpq": self.eps_qpq,
            "n": self.n,
            "m": self.m,
        }


@dataclass(frozen=True)
class RoundRecord:
    index: int
    x: int
    y: int
    a: int
    b: int
    Y: int


@dataclass(frozen=True)
class RoundTable:
    """Column store of CHSH rounds; iterate for :class:`RoundRecord` rows."""

    index: np.ndarray
    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray
    Y: np.ndarray

    def __len__(self) -> int:
        return len(self.index)

    def __iter__(self) -> Iterator[RoundRecord]:
        for row in zip(*(col.tolist() for col in (self.index, self.x, self.y, self.a, self.b, self.Y))):
            yield RoundRecord(*row)


@dataclass(frozen=True)
class KeyTranscript:
    indices: np.ndarray
    bob_bits: np.ndarray
    alice_basis: np.ndarray
    alice_bits: np.ndarray  # INCONCLUSIVE where Alice learned nothing
    biased: np.ndarray

    @classmethod
    def empty(cls) -> "KeyTranscript":
        z = np.zeros(0, dtype=np.int8)
        return cls(np.zeros(0, dtype=np.int64), z, z, z, np.zeros(0, dtype=bool))

    @property
    def conclusive(self) -> np.ndarray:
        return self.alice_bits != INCONCLUSIVE

    @property
    def conclusive_count(self) -> int:
        return int(np.count_nonzero(self.conclusive))

    @property
    def conclusive_fraction(self) -> float:
        return self.conclusive_count / len(self.bob_bits) if len(self.bob_bits) else 0.0

    @property
    def error_count(self) -> int:
        mask = self.conclusive
        return int(np.count_nonzero(self.alice_bits[mask] != self.bob_bits[mask]))

    def summary(self) -> dict:
        return {
            "bob_bits_count": int(len(self.bob_bits)),
            "conclusive_count": self.conclusive_count,
            "conclusive_fraction": self.conclusive_fraction,
        }


@dataclass(frozen=True)
class Transcript:
    params: ProtocolParams
    adversary: Optional[AdversaryConfig]
    seed: int
    stream_id: int
    chsh_indices: np.ndarray
    qpq_indices: np.ndarray
    biased: np.ndarray
    rounds: RoundTable
    test_statistic: float
    decision: str
    key: KeyTranscript = field(default_factory=KeyTranscript.empty)

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPT

    def to_dict(self, include_rounds: bool = False) -> dict:
        out = {
            "params": self.params.to_dict(),
            "adversary": None if self.adversary is None else self.adversary.to_dict(),
            "decision": self.decision,
            "test_statistic": self.test_statistic,
            "chsh_indices": self.chsh_indices.tolist(),
        }
        if include_rounds:
            out["rounds"] = [vars(r) for r in self.rounds]
        out["key_summary"] = self.key.summary()
        out["seed"] = self.seed
        return out


def partition_states(n: int, m: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Uniform m-subset of range(n) by a partial Fisher-Yates shuffle.

    Position i is swapped with a uniform position in [i, n) for i = 0..m-1.
    Both index sets are returned sorted.
    """
    n = check_count("n", n)
    m = check_count("m", m)
    if m >= n:
        raise DomainError(f"m must be smaller than n (got m={m}, n={n})")
    offsets = rng.generator.integers(0, n - np.arange(m)).tolist()
    perm = list(range(n))
    for i, off in enumerate(offsets):
        j = i + off
        perm[i], perm[j] = perm[j], perm[i]
    chosen = np.sort(np.array(perm[:m], dtype=np.int64))
    rest = np.sort(np.array(perm[m:], dtype=np.int64))
    return chosen, rest


def _choose_subset(n: int, r: int, rng: RngStream) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    if r == n:
        mask[:] = True
    elif r > 0:
        mask[partition_states(n, r, rng)[0]] = True
    return mask


def chsh_round(
    state: TwoQubitState, x: int, y: int, angles: GameAngles, rng: RngStream, index: int = 0
) -> RoundRecord:
    """One local CHSH round: Bob measures both halves of the pair himself."""
    first = basis_from_angle(FIRST_QUBIT_ANGLES[x])
    second = basis_from_angle(angles.second_qubit_angles()[y])
    a, b = sample_outcome(joint_distribution(state, first, second), rng)
    return RoundRecord(index, x, y, a, b, int((a ^ b) == (x & y)))


def _state_pair(theta: float, adversary: Optional[AdversaryConfig]):
    honest = make_honest_state(theta)
    biased = honest if adversary is None else make_biased_state(theta, adversary.eps_a)
    return honest, biased


def play_rounds(
    indices: np.ndarray,
    biased: np.ndarray,
    theta: float,
    angles: GameAngles,
    adversary: Optional[AdversaryConfig],
    inputs: RngStream,
    outcomes: RngStream,
) -> RoundTable:
    """Vectorized :func:`chsh_round` over ``indices``; ``biased`` flags each pair."""
    count = len(indices)
    cdf = np.stack([cumulative(round_distributions(s, angles)) for s in _state_pair(theta, adversary)])
    x = inputs.bits(count)
    y = inputs.bits(count)
    k = outcome_index(cdf[biased.astype(np.int8), x, y], outcomes.uniform(count))
    a = k >> 1
    b = k & 1
    win = ((a ^ b) == (x & y)).astype(np.int8)
    return RoundTable(np.asarray(indices, dtype=np.int64), x, y, a, b, win)


def evaluate_test(rounds: RoundTable, interval: tuple[float, float]) -> tuple[float, str]:
    if len(rounds) == 0:
        raise DomainError("cannot evaluate an empty test set")
    wins = int(np.count_nonzero(rounds.Y))
    stat = wins / len(rounds)
    lo, hi = interval
    return stat, ACCEPT if lo <= stat <= hi else ABORT


def key_distributions(theta: float, adversary: Optional[AdversaryConfig]) -> np.ndarray:
    """Joint (Bob bit, Alice outcome) probabilities, shape ``(kind, alice_basis, 4)``.

    Bob measures in the computational basis; Alice measures in the phi0 basis
    (angle theta) or the phi1 basis (angle -theta).
    """
    bob = basis_from_angle(0.0)
    alice = (basis_from_angle(theta), basis_from_angle(-theta))
    return np.array(
        [[joint_distribution(s, bob, alice[k]).p for k in (0, 1)] for s in _state_pair(theta, adversary)]
    )


def qpq_key_phase(
    qpq_indices,
    theta: float,
    adversary: Optional[AdversaryConfig],
    rng: RngStream,
    biased: Optional[np.ndarray] = None,
) -> KeyTranscript:
    """Key establishment on the untested pairs.

    Alice picks the phi0 basis with probability 1/2 - bias (bias 0 on honest
    pairs). Getting the orthogonal outcome of her basis rules out one of the two
    states, so phi0-perp reveals Bob's bit 1 and phi1-perp reveals bit 0.
    ``biased`` defaults to every pair when an adversary is given.
    """
    theta = check_theta(theta)
    indices = np.asarray(qpq_indices, dtype=np.int64)
    count = len(indices)
    if biased is None:
        biased = np.full(count, adversary is not None)
    biased = np.asarray(biased, dtype=bool)
    bias = 0.0 if adversary is None else adversary.key_basis_bias

    p_phi0 = np.where(biased, 0.5 - bias, 0.5)
    basis = (rng.substream(0).uniform(count) >= p_phi0).astype(np.int8)
    cdf = cumulative(key_distributions(theta, adversary))
    k = outcome_index(cdf[biased.astype(np.int8), basis], rng.substream(1).uniform(count))
    bob_bits = (k >> 1).astype(np.int8)
    perp = (k & 1).astype(bool)
    alice_bits = np.where(perp, 1 - basis, INCONCLUSIVE).astype(np.int8)
    return KeyTranscript(indices, bob_bits, basis, alice_bits, biased)


def run_protocol(
    params: ProtocolParams,
    adversary: Optional[AdversaryConfig] = None,
    seed: int = 0,
    stream_id: int = 0,
) -> Transcript:
    """Certify a pool of ``n`` pairs on a random ``m``-subset, then run the key phase.

    An abort still yields a complete transcript, with an empty key.
    """
    root = RngStream(seed, stream_id)
    n, m = params.n, params.m
    if adversary is None:
        biased = np.zeros(n, dtype=bool)
    else:
        biased = _choose_subset(n, adversary.biased_count(n), root.substream(0))
    chsh_idx, qpq_idx = partition_states(n, m, root.substream(1))
    rounds = play_rounds(
        chsh_idx, biased[chsh_idx], params.theta, params.angles, adversary,
        root.substream(2), root.substream(3),
    )
    stat, decision = evaluate_test(rounds, params.interval)
    key = KeyTranscript.empty()
    if decision == ACCEPT:
        key = qpq_key_phase(qpq_idx, params.theta, adversary, root.substream(4), biased[qpq_idx])
    return Transcript(params, adversary, seed, stream_id, chsh_idx, qpq_idx, biased, rounds, stat, decision, key)


def _map_trials(fn, trials: int, threads: Optional[int]):
    if threads is None or threads <= 1 or trials == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def verify_theorem1(
    theta: float,
    m: int,
    n: int,
    trials: int,
    eps_qpq: float,
    seed: int = 0,
    threads: Optional[int] = None,
) -> float:
    """Fraction of trials where test-set and remaining-set win rates differ by more than nu."""
    theta = check_theta(theta)
    trials = check_count("trials", trials)
    nu = qpq_deviation_nu(m, n, eps_qpq)
    angles = optimal_angles(theta)
    everyone = np.arange(n)
    honest = np.zeros(n, dtype=bool)

    def gap(t):
        root = RngStream(seed, t)
        rounds = play_rounds(everyone, honest, theta, angles, None, root.substream(2), root.substream(3))
        chsh_idx, qpq_idx = partition_states(n, m, root.substream(1))
        return abs(rounds.Y[chsh_idx].mean() - rounds.Y[qpq_idx].mean())

    gaps = np.array(_map_trials(gap, trials, threads))
    return float(np.mean(gaps > nu))


@dataclass(frozen=True)
class TrialOutcome:
    test_statistic: float
    accepted: bool
    key_size: int
    conclusive: int
    biased_key_size: int
    biased_conclusive: int
    key_errors: int

    @classmethod
    def from_transcript(cls, tr: Transcript) -> "TrialOutcome":
        key = tr.key
        conc = key.conclusive
        return cls(
            tr.test_statistic,
            tr.accepted,
            len(key.bob_bits),
            int(np.count_nonzero(conc)),
            int(np.count_nonzero(key.biased)),
            int(np.count_nonzero(conc & key.biased)),
            key.error_count,
        )


@dataclass(frozen=True)
class MonteCarloSummary:
    """Aggregate over trials.

    ``mean_conclusive_fraction`` and ``mean_biased_conclusive_fraction`` average
    over accepted trials only (None when every trial aborted);
    ``mean_alice_known_fraction`` averages over all trials, counting an abort
    as zero known key.
    """

    trials: int
    acceptance_rate: float
    mean_test_statistic: float
    std_test_statistic: float
    mean_conclusive_fraction: Optional[float]
    mean_biased_conclusive_fraction: Optional[float]
    mean_alice_known_fraction: float
    key_errors: int

    @classmethod
    def from_outcomes(cls, outcomes) -> "MonteCarloSummary":
        stats = np.array([o.test_statistic for o in outcomes])
        accepted = [o for o in outcomes if o.accepted]
        conc = [o.conclusive / o.key_size for o in accepted if o.key_size]
        biased = [o.biased_conclusive / o.biased_key_size for o in accepted if o.biased_key_size]
        known = [o.conclusive / o.key_size if o.key_size else 0.0 for o in outcomes]
        return cls(
            trials=len(outcomes),
            acceptance_rate=len(accepted) / len(outcomes),
            mean_test_statistic=float(stats.mean()),
            std_test_statistic=float(stats.std(ddof=1)) if len(stats) > 1 else 0.0,
            mean_conclusive_fraction=float(np.mean(conc)) if conc else None,
            mean_biased_conclusive_fraction=float(np.mean(biased)) if biased else None,
            mean_alice_known_fraction=float(np.mean(known)),
            key_errors=sum(o.key_errors for o in outcomes),
        )

    def to_dict(self) -> dict:
        return dict(vars(self))


def monte_carlo_summary(
    params: ProtocolParams,
    adversary: Optional[AdversaryConfig],
    trials: int,
    seed: int = 0,
    threads: Optional[int] = None,
) -> MonteCarloSummary:
    trials = check_count("trials", trials)

    def one(t):
        return TrialOutcome.from_transcript(run_protocol(params, adversary, seed, stream_id=t))

    return MonteCarloSummary.from_outcomes(_map_trials(one, trials, threads))


def repetitions_needed(database_size: int, params: ProtocolParams) -> int:
    """Protocol repetitions needed for the key to cover every database position."""
    database_size = check_count("database_size", database_size)
    return math.ceil(database_size / (params.n - params.m))
