import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addiviol.maxoverlap import subspace_lambda_max
from addiviol.minentropy import (
    antisym_min_entropy_bound,
    min_output_renyi,
    output_spectrum,
    screen_subspace,
    vn_violation_condition,
)
from addiviol.renyi import renyi_entropy
from addiviol.subspace import (
    antisymmetric_subspace,
    channel_from_subspace,
    full_space,
    parthasarathy_subspace,
    random_subspace,
    span,
)
from addiviol.tensor import haar_random_states


def check_witness(ch, res):
    spec = output_spectrum(ch, res.argmin.vec)
    assert abs(renyi_entropy(spec, res.p) - res.value) < 1e-8


def test_antisym_d3_von_neumann():
    ch = channel_from_subspace(antisymmetric_subspace(3))
    res = min_output_renyi(ch, 1, restarts=8)
    assert abs(res.value - 1) < 1e-6
    check_witness(ch, res)


@pytest.mark.parametrize("p", [0, 0.5, 1, 2, math.inf])
def test_identity_channel_is_zero(p):
    ch = channel_from_subspace(full_space(3, 3))
    res = min_output_renyi(ch, p, restarts=4)
    assert abs(res.value) < 1e-6
    check_witness(ch, res)


def test_antisym_d6_min_entropy():
    res = min_output_renyi(channel_from_subspace(antisymmetric_subspace(6)), "inf", restarts=8)
    assert abs(res.value - 1) < 1e-6


@pytest.mark.parametrize("d", [3, 4, 5, 6])
@pytest.mark.parametrize("p", [0.5, 1, 2, math.inf])
def test_never_beats_certified_bound(d, p):
    ch = channel_from_subspace(antisymmetric_subspace(d))
    res = min_output_renyi(ch, p, restarts=8)
    assert res.value >= antisym_min_entropy_bound(d, p) - 1e-6
    assert abs(res.value - 1) < 1e-6
    check_witness(ch, res)


def test_bound_examples():
    for d in (2, 5, 9):
        for p in (0, 1, 3, math.inf):
            assert antisym_min_entropy_bound(d, p) == 1.0
    with pytest.raises(ValueError):
        antisym_min_entropy_bound(1)


def test_d2_brute_force():
    # one-dimensional input: the only state is the singlet
    ch = channel_from_subspace(antisymmetric_subspace(2))
    for p in (0, 0.5, 1, 2, 7, math.inf):
        res = min_output_renyi(ch, p, restarts=3)
        direct = renyi_entropy(output_spectrum(ch, np.ones(1)), p)
        assert res.value == direct
        assert abs(direct - 1) < 1e-12


def test_vn_violation_condition():
    assert vn_violation_condition(2, 2) == 2.0
    assert vn_violation_condition(3, 9) == 0
    # frozen from a 30-digit evaluation
    val = vn_violation_condition(16, 243)
    assert abs(val - 0.695956426906097818158) < 1e-12
    assert val < 2
    with pytest.raises(ValueError):
        vn_violation_condition(2, 5)


def test_screen_examples():
    assert abs(screen_subspace(antisymmetric_subspace(4), 1, restarts=8).value - 1) < 1e-6
    # a subspace holding |00>
    prod = np.zeros((9, 2))
    prod[0, 0] = 1
    prod[4, 1] = 1 / np.sqrt(2)
    prod[5, 1] = 1 / np.sqrt(2)
    assert abs(screen_subspace(span(prod, 3, 3), 1, restarts=8).value) < 1e-6
    part = screen_subspace(parthasarathy_subspace(3), 1, restarts=16)
    assert part.value > 1e-3


def test_min_entropy_matches_seesaw():
    for seed in range(5):
        s = random_subspace(3, 3, 3, seed=seed)
        lam = subspace_lambda_max(s, restarts=16).value
        res = min_output_renyi(channel_from_subspace(s), math.inf, restarts=16)
        assert abs(res.value + math.log2(lam)) < 1e-8


def test_gradient_search_agrees_with_seesaw_at_large_order():
    # a large finite order is close to min-entropy; the seesaw is an independent oracle
    s = random_subspace(3, 3, 2, seed=11)
    lam = subspace_lambda_max(s, restarts=32).value
    res = min_output_renyi(channel_from_subspace(s), 60, restarts=16)
    spec = res.spectrum_at_argmin
    assert res.value >= -math.log2(lam) - 1e-6
    assert abs(renyi_entropy(spec, math.inf) + math.log2(lam)) < 5e-3


def test_random_inputs_never_beat_minimum():
    s = random_subspace(2, 3, 3, seed=4)
    ch = channel_from_subspace(s)
    res = min_output_renyi(ch, 2, restarts=16)
    for x in haar_random_states(3, 500, seed=1):
        assert renyi_entropy(output_spectrum(ch, x), 2) >= res.value - 1e-9


def test_deterministic():
    ch = channel_from_subspace(random_subspace(3, 3, 4, seed=2))
    a = min_output_renyi(ch, 1.5, restarts=6, seed=3)
    b = min_output_renyi(ch, 1.5, restarts=6, seed=3)
    assert a.value == b.value
    assert np.array_equal(a.argmin.vec, b.argmin.vec)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_at_fixed_argmin(seed):
    s = random_subspace(2, 3, 2, seed=seed)
    res = min_output_renyi(channel_from_subspace(s), 2, restarts=2, seed=seed % 1000, max_iter=50)
    vals = [renyi_entropy(res.spectrum_at_argmin, p) for p in (0, 0.5, 1, 2, 5, math.inf)]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
