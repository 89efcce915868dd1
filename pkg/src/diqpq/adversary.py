"""Alice's cheating strategies: biased preparation, threshold biases, key leakage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ._checks import DomainError, check_bias, check_count, check_theta
from .bounds import acceptance_interval
from .chsh import optimal_angles, p_max, success_probability_biased

MAX_BIAS = 0.5


@dataclass(frozen=True)
class AdversaryConfig:
    """Biased preparation of ``r`` of the ``n`` pairs (all of them when ``r`` is None).

    ``basis_bias`` defaults to ``eps_a``: Alice picks the phi1 basis with
    probability 1/2 + basis_bias on the pairs she biased.
    """

    eps_a: float
    r: Optional[int] = None
    basis_bias: Optional[float] = None

    def __post_init__(self):
        check_bias(self.eps_a)
        if self.basis_bias is not None:
            check_bias(self.basis_bias)
        if self.r is not None:
            check_count("r", self.r, minimum=0)

    @property
    def key_basis_bias(self) -> float:
        return self.eps_a if self.basis_bias is None else self.basis_bias

    def biased_count(self, n: int) -> int:
        if self.r is None:
            return n
        if self.r > n:
            raise DomainError(f"r={self.r} exceeds n={n}")
        return self.r

    def to_dict(self) -> dict:
        return {"eps_a": self.eps_a, "r": self.r, "basis_bias": self.key_basis_bias}


def _threshold_constant(theta: float, epsilon: float) -> float:
    # c = 2 eps p_max / cos(psi1*); cos(psi1*) > 0 on (0, pi/2]
    if not (math.isfinite(epsilon) and 0.0 <= epsilon < 1.0):
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    angles = optimal_angles(theta)
    return 2.0 * epsilon * p_max(theta) / math.cos(angles.psi1)


def bias_threshold_paper(theta: float, epsilon: float) -> float:
    """Largest undetectable bias when the O(eps_a^4) term is dropped."""
    return min(MAX_BIAS, math.sqrt(_threshold_constant(theta, epsilon)))


def bias_threshold_exact(theta: float, epsilon: float) -> float:
    """Largest eps_a keeping the optimal-angle win rate >= p_max (1 - epsilon).

    At the optimal angles cos(psi2) = -cos(psi1), so the win rate drops by
    cos(psi1) (1/2 - sqrt(1/4 - eps_a^2)) / 2 and the bound solves to
    sqrt(c (1 - c)).
    """
    c = _threshold_constant(theta, epsilon)
    if c >= 0.5:
        return MAX_BIAS
    return math.sqrt(c * (1.0 - c))


def bias_threshold_partial(theta: float, epsilon: float, r: int, n: int) -> float:
    """Threshold when only ``r`` of ``n`` pairs carry the bias."""
    n = check_count("n", n)
    r = check_count("r", r)
    if r > n:
        raise DomainError(f"r={r} exceeds n={n}")
    base = math.sqrt(_threshold_constant(theta, epsilon))
    return min(MAX_BIAS, base * math.sqrt(n / r))


def leakage_fraction(theta: float, eps_a: float) -> float:
    """Fraction of the raw key Alice learns conclusively: (1/2 + 2 eps_a^2) sin^2(theta)."""
    theta = check_theta(theta)
    eps_a = check_bias(eps_a)
    return (0.5 + 2.0 * eps_a**2) * math.sin(theta) ** 2


def additional_leakage(theta: float, eps_a: float) -> float:
    """Extra information credited to the bias, eps_a^2 sin^2(theta).

    This is half of :func:`leakage_gain`; both figures are reported.
    """
    theta = check_theta(theta)
    eps_a = check_bias(eps_a)
    return eps_a**2 * math.sin(theta) ** 2


def leakage_gain(theta: float, eps_a: float) -> float:
    """leakage_fraction(theta, eps_a) - leakage_fraction(theta, 0)."""
    return 2.0 * additional_leakage(theta, eps_a)


def biased_success_at_optimum(theta: float, eps_a: float) -> float:
    angles = optimal_angles(theta)
    return success_probability_biased(theta, angles.psi1, angles.psi2, eps_a)


def mixture_success_probability(theta: float, eps_a: float, r: int, n: int) -> float:
    """Expected win rate when ``r`` of ``n`` pairs are biased and the rest honest."""
    if not 0 <= r <= n:
        raise DomainError(f"need 0 <= r <= n (got r={r}, n={n})")
    frac = r / n
    return frac * biased_success_at_optimum(theta, eps_a) + (1.0 - frac) * p_max(theta)


def attack_sweep(theta: float, epsilon: float, eps_values, r: Optional[int] = None, n: Optional[int] = None):
    """Rows ``(eps_a, success_prob, accepted, leakage_fraction)``.

    ``accepted`` compares the expected win rate with the acceptance window; with
    ``r`` and ``n`` the expectation is the honest/biased mixture.
    """
    lo, hi = acceptance_interval(theta, epsilon)
    rows = []
    for eps_a in eps_values:
        eps_a = float(eps_a)
        if r is None:
            prob = biased_success_at_optimum(theta, eps_a)
        else:
            prob = mixture_success_probability(theta, eps_a, r, n)
        rows.append((eps_a, prob, lo <= prob <= hi, leakage_fraction(theta, eps_a)))
    return rows
