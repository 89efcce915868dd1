"""Local CHSH game: closed-form success probabilities, optimal angles, Born oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._checks import HALF_PI, DomainError, check_bias, check_count, check_theta
from .states import TwoQubitState, basis_from_angle, joint_distribution

# Bob's first-qubit basis per input x: computational, then Hadamard.
FIRST_QUBIT_ANGLES = (0.0, HALF_PI)


@dataclass(frozen=True)
class GameAngles:
    theta: float
    phi: float
    psi1: float
    psi2: float

    def second_qubit_angles(self) -> tuple[float, float]:
        return (self.psi1, self.psi2)


def optimal_angles(theta: float) -> GameAngles:
    """Measurement angles maximizing the honest-state success probability.

    With r^2 = 1 + sin^2(theta) the objective becomes
    r (sin(psi1 + phi) + sin(psi2 - phi)), tan(phi) = 1/sin(theta), maximal at
    psi1 = pi/2 - phi and psi2 = pi/2 + phi.
    """
    theta = check_theta(theta)
    phi = math.atan(1.0 / math.sin(theta))
    return GameAngles(theta, phi, HALF_PI - phi, HALF_PI + phi)


def success_probability(theta: float, psi1: float, psi2: float) -> float:
    theta = check_theta(theta)
    return (
        math.sin(theta) * (math.sin(psi1) + math.sin(psi2))
        + math.cos(psi1)
        - math.cos(psi2)
    ) / 8 + 0.5


def success_probability_biased(
    theta: float, psi1: float, psi2: float, eps_a: float
) -> float:
    """Success probability when the pair is prepared with state bias ``eps_a``."""
    theta = check_theta(theta)
    eps_a = check_bias(eps_a)
    return (
        0.5
        + math.sin(theta) * (math.sin(psi1) + math.sin(psi2)) / 8
        + math.sqrt(0.25 - eps_a * eps_a) * (math.cos(psi1) - math.cos(psi2)) / 4
        + eps_a * math.cos(theta) * (math.cos(psi1) + math.cos(psi2)) / 4
    )


def p_max(theta: float) -> float:
    theta = check_theta(theta)
    return 0.5 + math.sqrt(1.0 + math.sin(theta) ** 2) / 4


def round_distributions(state: TwoQubitState, angles: GameAngles) -> np.ndarray:
    """Joint outcome probabilities for every input pair, shape ``(2, 2, 4)``."""
    table = np.empty((2, 2, 4))
    seconds = angles.second_qubit_angles()
    for x in (0, 1):
        first = basis_from_angle(FIRST_QUBIT_ANGLES[x])
        for y in (0, 1):
            table[x, y] = joint_distribution(state, first, basis_from_angle(seconds[y])).p
    return table


def oracle_success_probability(state: TwoQubitState, angles: GameAngles) -> float:
    """Average win rate over uniform inputs, from Born probabilities alone."""
    table = round_distributions(state, angles)
    total = 0.0
    for x in (0, 1):
        for y in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    if a ^ b == x & y:
                        total += table[x, y, 2 * a + b]
    return total / 4


def pmax_curve(theta_min: float, theta_max: float, steps: int, full_range: bool = False):
    """Rows ``(theta, p_max)`` on an evenly spaced grid.

    ``full_range`` lifts the upper limit to pi; beyond pi/2 the values come from
    the closed form only, since the protocol itself is restricted to (0, pi/2].
    """
    steps = check_count("steps", steps)
    upper = math.pi if full_range else HALF_PI
    check_theta(theta_min, upper)
    check_theta(theta_max, upper)
    if theta_min > theta_max:
        raise DomainError("theta_min must not exceed theta_max")
    grid = [theta_min] if steps == 1 else np.linspace(theta_min, theta_max, steps)
    return [(float(t), 0.5 + math.sqrt(1.0 + math.sin(t) ** 2) / 4) for t in grid]
