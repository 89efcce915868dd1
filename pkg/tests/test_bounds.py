import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diqpq import DomainError
from diqpq.bounds import (
    acceptance_interval,
    chernoff_sample_size,
    chsh_deviation_delta,
    qpq_deviation_nu,
    sample_size_sweep,
    serfling_corollary_deviation,
    serfling_tail,
)

P_HALF_PI = 0.5 + math.sqrt(2) / 4


@pytest.mark.parametrize(
    "epsilon, gamma, p, expected",
    [(0.01, 0.01, P_HALF_PI, 31605), (0.1, 0.01, P_HALF_PI, 317), (0.05, 0.1, P_HALF_PI, 633), (0.3, 1.0, 0.5, 0)],
)
def test_chernoff_sample_size(epsilon, gamma, p, expected):
    assert chernoff_sample_size(epsilon, gamma, p) == expected


@given(
    st.floats(min_value=1e-3, max_value=0.5),
    st.floats(min_value=1e-9, max_value=0.999),
    st.floats(min_value=0.05, max_value=1.0),
)
def test_chernoff_ceiling_is_minimal(epsilon, gamma, p):
    m = chernoff_sample_size(epsilon, gamma, p)
    rate = 2 * epsilon**2 * p**2
    assert math.exp(-rate * m) <= gamma
    assert m == 0 or math.exp(-rate * (m - 1)) > gamma


@pytest.mark.parametrize("args", [(0.0, 0.1, 0.5), (1.0, 0.1, 0.5), (0.1, 0.0, 0.5), (0.1, 0.1, 0.0), (0.1, 0.1, 1.2)])
def test_chernoff_domain(args):
    with pytest.raises(DomainError):
        chernoff_sample_size(*args)


def test_delta():
    assert chsh_deviation_delta(10000, 1e-6) == pytest.approx(math.sqrt(math.log(1e6) / 20000), rel=1e-15)
    assert chsh_deviation_delta(10000, 1e-6) == pytest.approx(0.02628261, abs=5e-9)
    assert chsh_deviation_delta(77, 1.0) == 0.0
    assert chsh_deviation_delta(400, 1e-3) == pytest.approx(chsh_deviation_delta(100, 1e-3) / 2, rel=1e-14)
    with pytest.raises(DomainError):
        chsh_deviation_delta(0, 0.1)


def test_nu():
    assert qpq_deviation_nu(10000, 20000, 1e-6) == pytest.approx(0.03717108, abs=5e-9)
    m = 313
    assert qpq_deviation_nu(m, 2 * m, 1e-4) == pytest.approx(math.sqrt((m + 1) / m**2 * math.log(1e4)), rel=1e-14)
    assert qpq_deviation_nu(10, 30, 1.0) == 0.0
    with pytest.raises(DomainError):
        qpq_deviation_nu(10, 10, 0.1)


def test_serfling_tail():
    assert serfling_tail(100, 50, 0.1, 0, 1) == pytest.approx(math.exp(-100 / 51), rel=1e-14)
    assert serfling_tail(100, 50, 0.1, 0, 1) == pytest.approx(0.14075, abs=5e-6)
    assert serfling_tail(100, 50, 0.0) == 1.0
    values = [serfling_tail(100, 50, d) for d in np.linspace(0, 2, 40)]
    assert all(b < a for a, b in zip(values, values[1:]))
    # range enters un-squared
    assert serfling_tail(100, 50, 0.1, 0, 2) == pytest.approx(math.exp(-100 / 102), rel=1e-14)
    with pytest.raises(DomainError):
        serfling_tail(10, 11, 0.1)


def test_serfling_corollary():
    assert serfling_corollary_deviation(20000, 10000, 1e-6) == pytest.approx(0.03717108, abs=5e-9)
    assert serfling_corollary_deviation(50, 20, 1.0) == 0.0
    worst_remainder = serfling_corollary_deviation(100, 99, 0.05)
    assert math.isfinite(worst_remainder) and worst_remainder > 0
    with pytest.raises(DomainError):
        serfling_corollary_deviation(10, 10, 0.1)


def test_nu_equals_corollary():
    gen = np.random.default_rng(8)
    for _ in range(100):
        n = int(gen.integers(2, 10**6))
        m = int(gen.integers(1, n))
        assert abs(qpq_deviation_nu(m, n, 1e-6) - serfling_corollary_deviation(n, m, 1e-6)) <= 1e-15


def test_acceptance_interval():
    lo, hi = acceptance_interval(math.pi / 2, 0.01)
    assert lo == pytest.approx(0.84501786, abs=5e-9)
    assert hi == pytest.approx(0.86208892, abs=5e-9)
    assert acceptance_interval(math.pi / 2, 0.0) == (P_HALF_PI, P_HALF_PI)
    assert acceptance_interval(math.pi / 2, 0.2)[1] == 1.0


def test_sweeps():
    assert sample_size_sweep("epsilon", 0.01, 0.1, 2, 0.01, P_HALF_PI) == [(0.01, 31605), (0.1, 317)]
    assert len(sample_size_sweep("epsilon", 0.05, 0.05, 1, 0.01, P_HALF_PI)) == 1
    rows = sample_size_sweep("p_max", 0.4, 0.8, 2, 0.01, 0.01)
    ratio = rows[0][1] / rows[1][1]
    assert ratio == pytest.approx(4.0, rel=1e-3)
    for axis, lo, hi, fixed in (("epsilon", 0.005, 0.2, P_HALF_PI), ("p_max", 0.75, P_HALF_PI, 0.01)):
        ms = [m for _, m in sample_size_sweep(axis, lo, hi, 100, 0.01, fixed)]
        assert all(b <= a for a, b in zip(ms, ms[1:]))
    with pytest.raises(DomainError):
        sample_size_sweep("gamma", 0.1, 0.2, 3, 0.01, 0.5)


def test_chernoff_empirical():
    gen = np.random.default_rng(5)
    eps, gamma, runs = 0.05, 0.1, 2000
    for p in (0.75, 0.8536):
        m = chernoff_sample_size(eps, gamma, p)
        means = gen.binomial(m, p, size=runs) / m
        rate = np.mean(np.abs(means - p) > eps * p)
        assert rate <= gamma + 3 * math.sqrt(gamma * (1 - gamma) / runs)


def test_serfling_empirical_by_explicit_sampling():
    gen = np.random.default_rng(6)
    population = np.array([1] * 120 + [0] * 80, dtype=float)
    means = np.array([gen.choice(population, 80, replace=False).mean() for _ in range(10_000)])
    for delta in (0.05, 0.1, 0.15):
        assert np.mean(np.abs(means - 0.6) >= delta) <= serfling_tail(200, 80, delta, 0, 1)
