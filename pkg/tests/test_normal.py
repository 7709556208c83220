from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from recipsum.lattice import (LatticeBasis, SystemMatrix, build_unipotent_lattice,
                              standard_lattice, successive_minima)
from recipsum.normal import (NormalizedBasis, mahler_weyl_basis, nest_supports, normalize,
                             support_mask, triangular_permutation, verify_support_ladder)
from recipsum.suite import random_lattice

E3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def strings(nb):
    return [[str(x) for x in v] for v in nb.vectors]


def test_mahler_weyl_standard():
    nb = mahler_weyl_basis(standard_lattice(2), M=1)
    assert [float(x) for x in nb.norms_squared()] == [1.0, 1.0]
    assert abs(nb.change_of_basis_det()) == 1


def test_mahler_weyl_diagonal():
    nb = mahler_weyl_basis(standard_lattice(2, [Fraction(1, 2), 3]), M=1)
    assert strings(nb) == [['1/2', '0'], ['0', '3']]


def test_mahler_weyl_half_lattice():
    nb = mahler_weyl_basis(LatticeBasis([[1, 0], [Fraction(1, 2), Fraction(1, 2)]]), M=1)
    assert strings(nb) == [['1/2', '1/2'], ['1/2', '-1/2']]
    assert abs(nb.change_of_basis_det()) == 1


def test_nesting_keeps_nested_input():
    nb = NormalizedBasis([[1, 0, 1], [1, 1, -1], [1, 1, 1]], E3, 1, None)
    out = nest_supports(nb)
    assert out.constants == (0, 0, 0)
    assert out.vectors == nb.vectors


def test_nesting_multiplier():
    nb = NormalizedBasis([[1, 0, 1], [-1, 1, -1], [0, 0, 3]], E3, 1, None)
    out = nest_supports(nb)
    assert out.constants == (0, 0, 1)
    assert out.is_nested()


def test_triangular_permutation_swaps():
    nb = NormalizedBasis([[1, 0, 1], [1, 1, 1], [2, 1, 1]], E3, 1, None)
    out = triangular_permutation(nb)
    assert out.permutation == (1, 0)
    assert out.support_sets() == [[1, 2], [1, 2, 3], [1, 2, 3]]


def test_triangular_permutation_identity():
    nb = NormalizedBasis([[1, 1, 0], [1, 1, 1], [2, 1, 1]], E3, 1, None)
    assert triangular_permutation(nb).permutation == (0, 1)
    nb = NormalizedBasis([[1, 1], [1, 2]], [[1, 0], [0, 1]], 1, None)
    assert triangular_permutation(nb).permutation == (0,)


def test_ladder_cases():
    quick = NormalizedBasis([[1, 1, 1]] * 3, [[1, 0, 0]] * 3, 1, None)
    assert verify_support_ladder(quick).case == 'quick'
    slow = NormalizedBasis([[1, 1, 0], [1, 1, 0], [1, 1, 1]], [[1, 0, 0]] * 3, 1, None)
    ladder = verify_support_ladder(slow)
    assert (ladder.case, ladder.s0) == ('slow', 2)
    assert ladder.branch(1) == 'naive'
    assert ladder.branch(3) == 'slow'
    zero = NormalizedBasis([[1, 0], [1, 1]], [[1, 0], [0, 1]], 1, None)
    assert verify_support_ladder(zero).case == 'zero_q'


def test_normalize_unipotent():
    nb, ladder = normalize(build_unipotent_lattice(SystemMatrix.parse('sqrt(2)')))
    assert nb.support_sets() == [[1], [1, 2]]
    assert (ladder.case, ladder.s0) == ('zero_q', 1)
    frame = ladder.to_frame()
    assert list(frame['s']) == [1, 2]


def test_support_mask():
    assert support_mask([1, 0, 1]) == 0b101
    assert support_mask([0, 0]) == 0


@pytest.mark.parametrize('seed', range(6))
def test_normalize_random_lattices(seed):
    rng = np.random.default_rng(seed)
    basis = random_lattice(rng, 3)
    report = successive_minima(basis)
    nb, ladder = normalize(basis, report, M=1)
    assert nb.is_nested()
    assert abs(nb.change_of_basis_det()) == 1
    assert len(ladder.supports) == 3
    # the first vector is a shortest one
    assert nb.norms_squared()[0] == report.squared[0]


@pytest.mark.parametrize('seed', range(24))
def test_normalize_norm_certificate(seed):
    rng = np.random.default_rng(seed)
    basis = random_lattice(rng, 2 + seed % 4)
    nb, _ = normalize(basis, successive_minima(basis), M=1)
    assert nb.certificate is not None
    assert all(nb.certificate)


E4 = [[int(i == j) for j in range(4)] for i in range(4)]

vectors_with_x = st.lists(
    st.tuples(st.integers(1, 5) | st.integers(-5, -1),
              st.lists(st.integers(-3, 3), min_size=3, max_size=3).filter(any)),
    min_size=4, max_size=4)


@given(vectors_with_x)
def test_triangular_permutation_keeps_norms(rows):
    nb = NormalizedBasis([[x] + y for x, y in rows], E4, 1, None)
    out = triangular_permutation(nb)
    assert sorted(out.norms_squared()) == sorted(nb.norms_squared())
    assert sorted(out.permutation) == [0, 1, 2]
