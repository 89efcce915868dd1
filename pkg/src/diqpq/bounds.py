"""Finite-sample statistics: Chernoff-Hoeffding sample size, Serfling deviations,
and the acceptance window of the local CHSH test."""

from __future__ import annotations

import math

import numpy as np

from ._checks import DomainError, check_count, check_open_unit, check_tail
from .chsh import p_max

DEFAULT_EPS_CHSH = 1e-6
DEFAULT_EPS_QPQ = 1e-6


def chernoff_sample_size(epsilon: float, gamma: float, p: float) -> int:
    """Smallest m with exp(-2 epsilon^2 p^2 m) <= gamma.

    Estimating p to within a relative error ``epsilon`` with confidence
    ``1 - gamma`` needs m >= ln(1/gamma) / (2 epsilon^2 p^2).
    """
    check_open_unit("epsilon", epsilon)
    check_tail("gamma", gamma)
    if not (math.isfinite(p) and 0.0 < p <= 1.0):
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    rate = 2.0 * epsilon**2 * p**2
    m = max(0, math.ceil(math.log(1.0 / gamma) / rate))
    # guard the ceiling against rounding in the quotient
    while m > 0 and math.exp(-rate * (m - 1)) <= gamma:
        m -= 1
    while math.exp(-rate * m) > gamma:
        m += 1
    return m


def chsh_deviation_delta(m: int, eps_chsh: float = DEFAULT_EPS_CHSH) -> float:
    m = check_count("m", m)
    check_tail("eps_chsh", eps_chsh)
    return math.sqrt(math.log(1.0 / eps_chsh) / (2.0 * m))


def qpq_deviation_nu(m: int, n: int, eps_qpq: float = DEFAULT_EPS_QPQ) -> float:
    """Deviation between the test-set and remaining-set win rates."""
    m = check_count("m", m)
    n = check_count("n", n)
    if n <= m:
        raise DomainError(f"n must exceed m (got m={m}, n={n})")
    check_tail("eps_qpq", eps_qpq)
    return math.sqrt((m + 1) / (2.0 * (1.0 - m / n) * m * m) * math.log(1.0 / eps_qpq))


def serfling_tail(n: int, k: int, delta: float, a: float = 0.0, b: float = 1.0) -> float:
    """Tail of the mean of ``k`` draws without replacement from ``n`` values in [a, b].

    The range enters un-squared, as in the form being reproduced; for the
    protocol's 0/1 variables the difference with the squared form vanishes.
    """
    n = check_count("n", n)
    k = check_count("k", k)
    if k > n:
        raise DomainError(f"k must not exceed n (got k={k}, n={n})")
    if not a < b:
        raise DomainError("interval requires a < b")
    if not (math.isfinite(delta) and delta >= 0.0):
        raise DomainError(f"delta must be >= 0, got {delta!r}")
    bound = math.exp(-2.0 * delta**2 * k * n / ((n - k + 1) * (b - a)))
    return min(1.0, max(0.0, bound))


def serfling_corollary_deviation(n: int, t: int, eps: float) -> float:
    n = check_count("n", n)
    t = check_count("t", t)
    if t >= n:
        raise DomainError(f"t must be smaller than n (got t={t}, n={n})")
    check_tail("eps", eps)
    return math.sqrt(n * (t + 1) / (2.0 * t * t * (n - t)) * math.log(1.0 / eps))


def acceptance_interval(theta: float, epsilon: float) -> tuple[float, float]:
    """Closed window [p_max(1 - eps), min(1, p_max(1 + eps))]."""
    if not (math.isfinite(epsilon) and 0.0 <= epsilon < 1.0):
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    p = p_max(theta)
    return (p * (1.0 - epsilon), min(1.0, p * (1.0 + epsilon)))


def sample_size_sweep(axis: str, lo: float, hi: float, steps: int, gamma: float, fixed: float):
    """Rows ``(axis_value, m_opt)`` along ``epsilon`` or ``p_max``.

    ``fixed`` is the other parameter: p when sweeping epsilon, epsilon when
    sweeping p_max.
    """
    steps = check_count("steps", steps)
    if axis not in ("epsilon", "p_max"):
        raise DomainError(f"axis must be 'epsilon' or 'p_max', got {axis!r}")
    if lo > hi:
        raise DomainError("sweep range must satisfy lo <= hi")
    grid = [lo] if steps == 1 else np.linspace(lo, hi, steps)
    rows = []
    for value in grid:
        value = float(value)
        if axis == "epsilon":
            rows.append((value, chernoff_sample_size(value, gamma, fixed)))
        else:
            rows.append((value, chernoff_sample_size(fixed, gamma, value)))
    return rows
