"""Two-qubit pure states, single-qubit projective bases and Born-rule sampling.

Amplitudes are ordered |00>, |01>, |10>, |11>. The first factor is Bob's
certifying qubit, the second the qubit later handed to Alice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._checks import DomainError, check_bias, check_theta

CONSTRUCTION_TOL = 1e-12
EXTERNAL_TOL = 1e-9

# Joint outcomes in inverse-CDF order; index k encodes (a, b) = (k >> 1, k & 1).
OUTCOME_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class TwoQubitState:
    amp: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.complex128).reshape(4)
        if not np.all(np.isfinite(amp)):
            raise DomainError("state amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @classmethod
    def from_amplitudes(cls, amps, tol=EXTERNAL_TOL) -> "TwoQubitState":
        """Build a state from external amplitudes, rejecting unnormalized input."""
        state = cls(amps)
        if abs(state.norm_squared() - 1.0) > tol:
            raise DomainError(
                f"state is not normalized: sum |amp|^2 = {state.norm_squared():.15g}"
            )
        return state

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))


@dataclass(frozen=True)
class ProjectiveBasis:
    """Orthonormal pair {cos(mu/2)|0> + sin(mu/2)|1>, sin(mu/2)|0> - cos(mu/2)|1>}.

    Outcome 0 is the first vector, outcome 1 its orthogonal complement.
    """

    angle: float

    def __post_init__(self):
        angle = float(self.angle) % (2 * math.pi)
        # tiny negative inputs wrap to exactly 2 pi
        object.__setattr__(self, "angle", 0.0 if angle == 2 * math.pi else angle)

    @property
    def vectors(self) -> np.ndarray:
        half = self.angle / 2
        c, s = math.cos(half), math.sin(half)
        return np.array([[c, s], [s, -c]], dtype=np.float64)


@dataclass(frozen=True)
class OutcomeDistribution:
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64).reshape(4)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def prob(self, a: int, b: int) -> float:
        return float(self.p[2 * a + b])

    def marginal_first(self) -> np.ndarray:
        return np.array([self.p[0] + self.p[1], self.p[2] + self.p[3]])

    def marginal_second(self) -> np.ndarray:
        return np.array([self.p[0] + self.p[2], self.p[1] + self.p[3]])


@dataclass
class RngStream:
    """Seeded random stream keyed by ``(seed, stream_id)``.

    Substreams are derived deterministically through :meth:`substream`, so a
    tree of streams can be rebuilt from the root key alone.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = (self.stream_id, *self.path)
        seq = np.random.SeedSequence(self.seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def substream(self, *labels: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.path, *labels))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self, size=None):
        return self._gen.random(size)

    def bits(self, size):
        return self._gen.integers(0, 2, size=size, dtype=np.int8)


def make_honest_state(theta: float) -> TwoQubitState:
    """(|0>|phi0> + |1>|phi1>)/sqrt(2) with phi0/phi1 = cos(theta/2)|0> +/- sin(theta/2)|1>."""
    return make_biased_state(theta, 0.0)


def make_biased_state(theta: float, eps_a: float) -> TwoQubitState:
    """alpha|0>|phi0> + beta|1>|phi1> with alpha^2 = 1/2 + eps_a, beta^2 = 1/2 - eps_a."""
    theta = check_theta(theta)
    eps_a = check_bias(eps_a)
    alpha = math.sqrt(0.5 + eps_a)
    beta = math.sqrt(0.5 - eps_a)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return TwoQubitState(np.array([alpha * c, alpha * s, beta * c, -beta * s]))


def basis_from_angle(mu: float) -> ProjectiveBasis:
    return ProjectiveBasis(mu)


def joint_distribution(
    state: TwoQubitState, first: ProjectiveBasis, second: ProjectiveBasis
) -> OutcomeDistribution:
    """Born probabilities of the four joint outcomes, in :data:`OUTCOME_ORDER`."""
    norm = state.norm_squared()
    if abs(norm - 1.0) > EXTERNAL_TOL:
        raise DomainError(f"state is not normalized: sum |amp|^2 = {norm:.15g}")
    psi = state.amp.reshape(2, 2)
    # amplitude of outcome (a, b) = sum_ij u_a[i] v_b[j] psi[i, j]; vectors are real
    amps = first.vectors @ psi @ second.vectors.T
    p = (np.abs(amps) ** 2).reshape(4)
    p = np.clip(p, 0.0, 1.0)
    return OutcomeDistribution(p / p.sum())


def cumulative(p) -> np.ndarray:
    """Inverse-CDF thresholds for the first three outcomes (the last is the remainder)."""
    return np.cumsum(np.asarray(p, dtype=np.float64)[..., :3], axis=-1)


def outcome_index(cdf: np.ndarray, u) -> np.ndarray:
    """Vectorized inverse CDF: first k with u < cdf[k], else 3."""
    u = np.asarray(u, dtype=np.float64)
    return np.sum(u[..., None] >= cdf, axis=-1).astype(np.int8)


def sample_outcome(dist: OutcomeDistribution, rng: RngStream) -> tuple[int, int]:
    k = int(outcome_index(cumulative(dist.p), rng.uniform()))
    return OUTCOME_ORDER[k]
