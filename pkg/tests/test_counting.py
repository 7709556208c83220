from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from recipsum.counting import (CountInstance, axis_count, axis_count_via_lattice,
                               cell_counts, certainly_empty, corner_determinant,
                               count_M_direct, count_via_lattice, count_bound, q_chunks,
                               ratio_bounds, slow_case_determinant)
from recipsum.errors import BudgetExceeded, DomainError, PrecondViolation
from recipsum.lattice import BoxSpec, theta_from_volume
from recipsum.partition import build_partition, extend_and_compose
from recipsum.suite import random_matrix


def test_small_count():
    inst = CountInstance('sqrt(2)', Fraction(3, 10), Fraction(1, 2), [5])
    assert count_M_direct(inst) == 6
    assert count_via_lattice(inst) == 6


@pytest.mark.parametrize('L, Q', [('sqrt(2)', [4]), ('sqrt(2),sqrt(3)', [2, 2])])
def test_every_q_counts_once(L, Q):
    # every ||L_i q|| <= 1/2 < eps, and T = 1/2 leaves one p per row
    inst = CountInstance(L, 1, Fraction(1, 2), Q)
    expected = int(np.prod([2 * q + 1 for q in Q])) - 1
    assert count_M_direct(inst) == expected
    assert count_via_lattice(inst) == expected


@pytest.mark.parametrize('seed', range(10))
def test_direct_and_lattice_counts_agree(seed):
    rng = np.random.default_rng(seed)
    M, N = (int(v) for v in rng.integers(1, 3, size=2))
    L = random_matrix(rng, M, N)
    Q = [int(v) for v in rng.integers(1, 6 if M + N < 4 else 4, size=N)]
    T = Fraction(int(rng.integers(1, 5)), 2)
    eps = Fraction(1, 2 ** int(rng.integers(0, 4)))
    inst = CountInstance(L, eps, T, Q)
    direct = count_M_direct(inst)
    assert direct == count_via_lattice(inst)
    # (p, q) and (-p, -q) pair up
    assert direct % 2 == 0


def test_chunks_add_up():
    inst = CountInstance('sqrt(3)', Fraction(1, 2), 1, [7])
    chunks = q_chunks(inst.Q, 3)
    assert chunks[0][0] == -7 and chunks[-1][1] == 7
    assert sum(count_M_direct(inst, q1_range=r) for r in chunks) == count_M_direct(inst)
    assert q_chunks(BoxSpec([5]), 3) == [(-5, -2), (-1, 2), (3, 5)]


def test_budget():
    inst = CountInstance('sqrt(2)', Fraction(3, 10), Fraction(1, 2), [5])
    with pytest.raises(BudgetExceeded):
        count_M_direct(inst, budget=5)


def test_axis_count():
    inst = CountInstance('sqrt(2)', 1, Fraction(5, 2), [3])
    assert axis_count(inst) == 5
    assert axis_count_via_lattice(inst) == 5


def test_bad_instances():
    with pytest.raises(DomainError):
        CountInstance('sqrt(2)', 0, 1, [4])
    with pytest.raises(DomainError):
        CountInstance('sqrt(2)', 1, -1, [4])
    with pytest.raises(DomainError):
        CountInstance('sqrt(2)', 1, 1, [4, 4])


def test_emptiness_for_golden():
    inst = CountInstance('golden', Fraction(1, 40), 1, [8])
    assert certainly_empty(inst, Fraction(38, 100))
    assert count_M_direct(inst) == 0


def test_count_bound():
    inst = CountInstance('sqrt(2)', Fraction(1, 8), 1, [4])
    assert float(count_bound(inst, Fraction(3, 10))) == pytest.approx(3.581989, abs=1e-6)
    with pytest.raises(PrecondViolation):
        count_bound(CountInstance('sqrt(2)', 1, 1, [4]), Fraction(3, 10))


def test_slow_case_determinant_values():
    assert slow_case_determinant(1, 1, 4, BoxSpec([5]), 2) == 1
    assert slow_case_determinant(1, 2, 4, BoxSpec([4, 1]), 2) == 1
    with pytest.raises(DomainError):
        slow_case_determinant(1, 2, 4, BoxSpec([4, 1]), 1)


@pytest.mark.parametrize('L, eps, Q', [
    ('sqrt(2),sqrt(3)', Fraction(1, 100), [4, 2]),
    ('sqrt(2);sqrt(3)', Fraction(1, 1000), [3]),
    ('sqrt(2),sqrt(5);sqrt(3),sqrt(7)', Fraction(1, 1000), [2, 5]),
])
def test_corner_determinants(L, eps, Q):
    inst = CountInstance(L, eps, 1, Q)
    part = build_partition(inst.region())
    th = theta_from_volume(eps, inst.Q.volume, inst.M, inst.N)
    for cell in part.cells:
        basis = extend_and_compose(cell, inst.L, inst.Q)
        for s0 in range(inst.M + 1, inst.M + inst.N + 1):
            got = corner_determinant(basis, s0)
            want = slow_case_determinant(inst.M, inst.N, th, inst.Q, s0, part.c)
            assert abs(got - want).approx() <= 1e-20 * abs(want).approx()


def test_ratio_bounds():
    inst = CountInstance('sqrt(2)', Fraction(1, 8), 1, [8])
    with pytest.raises(PrecondViolation):
        ratio_bounds(inst)
    report = ratio_bounds(inst, phi=Fraction(1, 3))
    frame = report.to_frame()
    assert len(frame) == 2
    assert list(frame['s']) == [1, 2]
    assert (frame['phi_source'] == 'assumed').all()
    assert report.fitted == frame['fitted'].max()


def test_cell_counts_add_up():
    inst = CountInstance('sqrt(2),sqrt(3)', Fraction(1, 8), 1, [3, 3])
    frame = cell_counts(inst)
    assert frame['count'].sum() == count_M_direct(inst)
    assert (frame['bound'] > 0).all()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(['sqrt(2)', 'golden', 'sqrt(2),sqrt(3)', 'sqrt(2);sqrt(3)']),
       st.integers(0, 5), st.integers(0, 5), st.integers(1, 4), st.integers(1, 4))
def test_count_monotone(L, a, b, t, u):
    N = len(L.split(';')[0].split(','))
    small_eps, big_eps = Fraction(1, 2 ** max(a, b)), Fraction(1, 2 ** min(a, b))
    small_T, big_T = Fraction(min(t, u), 2), Fraction(max(t, u), 2)
    small_Q, big_Q = [min(t, u) + 1] * N, [max(t, u) + 1] * N

    def count(eps, T, Q):
        return count_M_direct(CountInstance(L, eps, T, Q))

    assert count(small_eps, small_T, small_Q) <= count(big_eps, small_T, small_Q)
    assert count(small_eps, small_T, small_Q) <= count(small_eps, big_T, small_Q)
    assert count(small_eps, small_T, small_Q) <= count(small_eps, small_T, big_Q)
