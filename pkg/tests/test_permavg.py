import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lpvariance.permavg import (RearrangementInput, brute_avg_permutations, random_matrix_cases,
                                rearrangement_functional, ratio_window_check)
from lpvariance.rand_core import RngStream


def test_single_entry():
    inp = RearrangementInput([[-2.5]])
    assert rearrangement_functional(inp) == 2.5
    assert brute_avg_permutations(inp) == 2.5


@pytest.mark.parametrize("n", range(1, 8))
def test_all_ones(n):
    inp = RearrangementInput(np.ones((n, n)), 2)
    assert brute_avg_permutations(inp) == pytest.approx(math.sqrt(n), abs=1e-12)
    assert rearrangement_functional(inp) == pytest.approx(1 + math.sqrt(n - 1), abs=1e-12)
    assert 0.7 <= math.sqrt(n) / (1 + math.sqrt(n - 1)) <= 1


def test_single_nonzero():
    a = np.zeros((4, 4))
    a[2, 1] = -3.0
    assert rearrangement_functional(RearrangementInput(a)) == pytest.approx(3.0 / 4)


def test_identity_three():
    val = brute_avg_permutations(RearrangementInput(np.eye(3)))
    assert val == pytest.approx((math.sqrt(3) + 3) / 6, abs=1e-12)


def test_q_infinity():
    a = np.arange(9.0).reshape(3, 3)
    inp = RearrangementInput(a, math.inf)
    assert rearrangement_functional(inp) == pytest.approx((8 + 7 + 6) / 3 + 5)
    assert brute_avg_permutations(inp) > 0


def test_validation():
    with pytest.raises(ValueError):
        RearrangementInput(np.ones((2, 3)))
    with pytest.raises(ValueError):
        RearrangementInput(np.ones((2, 2)), 0.5)
    with pytest.raises(ValueError):
        RearrangementInput([[np.nan]])
    with pytest.raises(ValueError):
        brute_avg_permutations(RearrangementInput(np.ones((9, 9))))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)).filter(lambda a: np.abs(a).max() > 1e-3))
def test_invariances(a):
    inp = RearrangementInput(a)
    perm = RearrangementInput(a[::-1, :][:, [2, 0, 3, 1]])
    assert rearrangement_functional(perm) == pytest.approx(rearrangement_functional(inp))
    assert brute_avg_permutations(perm) == pytest.approx(brute_avg_permutations(inp))
    assert 0.2 <= brute_avg_permutations(inp) / rearrangement_functional(inp) <= 5


def test_cases_and_window():
    cases = random_matrix_cases(RngStream(4, 4), 5, 6)
    assert len(cases) == 6
    assert (cases[-1] > 0).all() and np.linalg.matrix_rank(cases[-1]) == 1
    res = ratio_window_check(20, 6, 2.0, RngStream(4, 5))
    assert 0.2 <= res["min"] <= res["max"] <= 5
    with pytest.raises(ValueError):
        ratio_window_check(3, 8, 2.0, RngStream(4, 5))
