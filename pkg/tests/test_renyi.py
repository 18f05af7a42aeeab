import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addiviol.multicopy import output_spectrum, totally_antisymmetric_input
from addiviol.renyi import binary_entropy, format_order, parse_order, rank_eps, renyi_entropy

ORDERS = [0, 0.3, 0.5, 0.999, 1, 1.5, 2, 4.79, 10, math.inf]


def random_spectrum(rng, n):
    x = rng.exponential(size=n) ** rng.uniform(0.5, 4)
    return x / x.sum()


@pytest.mark.parametrize("p", ORDERS)
@pytest.mark.parametrize("d", [1, 2, 5, 16])
def test_flat_spectrum(d, p):
    assert abs(renyi_entropy(np.full(d, 1 / d), p) - math.log2(d)) < 1e-12


def test_min_entropy_example():
    assert renyi_entropy([0.5, 0.5, 0.0], "inf") == 1.0


def test_antisym_joint_spectrum_at_threshold():
    spec = [1 / 3] + [1 / 12] * 8
    val = renyi_entropy(spec, 4.79)
    # frozen from a 30-digit evaluation of log2(3^-p + 8*12^-p)/(1-p)
    assert abs(val - 1.99920020844539626) < 1e-12
    assert val < 2


def test_errors():
    with pytest.raises(ValueError):
        renyi_entropy([0.5, 0.5], -1)
    with pytest.raises(ValueError):
        renyi_entropy([1.2, -0.2], 2)
    with pytest.raises(ValueError):
        renyi_entropy([0.5, 0.4], 2)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_parse_order():
    assert parse_order("inf") == math.inf
    assert parse_order("0") == 0
    assert parse_order("4.8") == 4.8


def test_binary_entropy():
    assert binary_entropy(0) == 0
    assert binary_entropy(1) == 0
    assert binary_entropy(0.5) == 1
    assert abs(binary_entropy(0.11) - 0.49991595816452800) < 1e-14


def test_rank_eps():
    assert rank_eps([0.9, 0.1, 0], 1e-9) == 2
    assert rank_eps(np.full(3, 1 / 3)) == 3
    spec = output_spectrum(3, totally_antisymmetric_input(3))
    assert rank_eps(spec) == 16
    with pytest.raises(ValueError):
        rank_eps([1.0], 0)


def test_von_neumann_window():
    spec = [0.7, 0.2, 0.1]
    vn = -sum(x * math.log2(x) for x in spec)
    assert renyi_entropy(spec, 1 + 1e-10) == renyi_entropy(spec, 1) == pytest.approx(vn, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_monotone_in_order(seed, n):
    spec = random_spectrum(np.random.default_rng(seed), n)
    vals = [renyi_entropy(spec, p) for p in ORDERS]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_additive_on_products(seed):
    rng = np.random.default_rng(seed)
    # keep entries well above the rank threshold so products stay above it too
    a = 0.99 * random_spectrum(rng, n := rng.integers(1, 6)) + 0.01 / n
    b = 0.99 * random_spectrum(rng, m := rng.integers(1, 6)) + 0.01 / m
    ab = np.outer(a, b).ravel()
    for p in ORDERS:
        assert abs(renyi_entropy(ab, p) - renyi_entropy(a, p) - renyi_entropy(b, p)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_continuity_at_limits(seed, n):
    spec = random_spectrum(np.random.default_rng(seed), n)
    s1 = renyi_entropy(spec, 1)
    assert abs(renyi_entropy(spec, 1 - 1e-6) - s1) < 1e-4
    assert abs(renyi_entropy(spec, 1 + 1e-6) - s1) < 1e-4
    assert abs(renyi_entropy(spec, 1000) - renyi_entropy(spec, math.inf)) < 1e-2


def test_format_order():
    assert [format_order(p) for p in (0, 1.0, 4.79, math.inf)] == ["0", "1", "4.79", "inf"]
