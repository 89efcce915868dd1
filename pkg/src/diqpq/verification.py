"""Self-check suites comparing closed forms with the Born oracle and Monte Carlo."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adversary import AdversaryConfig, leakage_fraction
from .bounds import (
    chernoff_sample_size,
    qpq_deviation_nu,
    serfling_corollary_deviation,
    serfling_tail,
)
from .chsh import GameAngles, oracle_success_probability, p_max, success_probability_biased
from .protocol import qpq_key_phase, verify_theorem1
from .states import RngStream, make_biased_state

SUITES = ("formulas", "bounds", "theorem1", "leakage")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    limit: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, "limit": self.limit}


def formulas(draws: int = 1000, seed: int = 0) -> list[Check]:
    gen = RngStream(seed, 0).generator
    worst = 0.0
    for _ in range(draws):
        theta = gen.uniform(1e-6, math.pi / 2)
        psi1, psi2 = gen.uniform(0.0, 2 * math.pi, 2)
        eps_a = gen.uniform(0.0, 0.5)
        angles = GameAngles(theta, 0.0, psi1, psi2)
        oracle = oracle_success_probability(make_biased_state(theta, eps_a), angles)
        worst = max(worst, abs(oracle - success_probability_biased(theta, psi1, psi2, eps_a)))
    peak = abs(p_max(math.pi / 2) - math.cos(math.pi / 8) ** 2)
    return [
        Check("oracle_vs_closed_form_max_abs_error", worst < 1e-12, worst, 1e-12),
        Check("p_max_half_pi_vs_cos2_pi_8", peak < 1e-12, peak, 1e-12),
    ]


def bounds(trials: int = 2000, seed: int = 0) -> list[Check]:
    gen = RngStream(seed, 1).generator
    out = []
    eps, gamma = 0.05, 0.1
    for p in (0.75, 0.8536):
        m = chernoff_sample_size(eps, gamma, p)
        means = gen.binomial(m, p, size=trials) / m
        rate = float(np.mean(np.abs(means - p) > eps * p))
        limit = gamma + 3 * math.sqrt(gamma * (1 - gamma) / trials)
        out.append(Check(f"chernoff_p={p}_m={m}", rate <= limit, rate, limit))
    # 80 draws without replacement from 120 ones and 80 zeros (mean 0.6)
    means = gen.hypergeometric(120, 80, 80, size=10_000) / 80
    for delta in (0.05, 0.1, 0.15):
        rate = float(np.mean(np.abs(means - 0.6) >= delta))
        limit = serfling_tail(200, 80, delta, 0.0, 1.0)
        out.append(Check(f"serfling_delta={delta}", rate <= limit, rate, limit))
    worst = 0.0
    for _ in range(100):
        n = int(gen.integers(2, 100_000))
        m = int(gen.integers(1, n))
        worst = max(worst, abs(qpq_deviation_nu(m, n, 1e-6) - serfling_corollary_deviation(n, m, 1e-6)))
    out.append(Check("nu_equals_corollary_deviation", worst <= 1e-15, worst, 1e-15))
    return out


def theorem1(trials: int = 2000, seed: int = 0, threads=None) -> list[Check]:
    eps_qpq = 0.05
    rate = verify_theorem1(math.pi / 2, 2000, 4000, trials, eps_qpq, seed, threads)
    limit = eps_qpq + 3 * math.sqrt(eps_qpq * (1 - eps_qpq) / trials)
    return [Check("theorem1_violation_rate", rate <= limit, rate, limit)]


def leakage(rounds: int = 100_000, seed: int = 0) -> list[Check]:
    out = []
    for i, theta in enumerate((math.pi / 6, math.pi / 3, math.pi / 2)):
        for j, eps_a in enumerate((0.0, 0.1, 0.3, 0.5)):
            expected = leakage_fraction(theta, eps_a)
            key = qpq_key_phase(np.arange(rounds), theta, AdversaryConfig(eps_a), RngStream(seed, 4 * i + j))
            sigma = math.sqrt(expected * (1 - expected) / rounds)
            z = abs(key.conclusive_fraction - expected) / sigma if sigma else 0.0
            ok = z <= 5.0 and key.error_count == 0
            out.append(Check(f"leakage_theta={theta:.6f}_eps_a={eps_a}", ok, z, 5.0))
    return out


def run_suite(name: str, trials=None, seed: int = 0, threads=None) -> list[Check]:
    if name == "formulas":
        return formulas(trials or 1000, seed)
    if name == "bounds":
        return bounds(trials or 2000, seed)
    if name == "theorem1":
        return theorem1(trials or 2000, seed, threads)
    if name == "leakage":
        return leakage(trials or 100_000, seed)
    raise ValueError(f"unknown suite {name!r}")
