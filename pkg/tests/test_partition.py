import math
from fractions import Fraction

import numpy as np
import pytest

from recipsum.errors import DomainError, NotInRegion, PrecondViolation
from recipsum.lattice import BoxSpec, SystemMatrix, standard_lattice, successive_minima
from recipsum.lattice import lattice_points_in_box
from recipsum.partition import (HyperbolicRegion, LogLinear, build_partition, cell_of,
                                davenport_count_bound, extend_and_compose, sample_region)
from recipsum.suite import random_lattice


def test_loglinear_arithmetic():
    a = LogLinear(1, -1, Fraction(1, 2))
    assert (a - a).is_zero()
    assert (a * 2).coefficients() == (2, -2, 1)
    assert str(LogLinear()) == '0'
    assert LogLinear(0, 1, 0).sign(2, 1) == 1
    assert LogLinear(0, 0, 1).sign(1, Fraction(1, 2)) == -1
    assert LogLinear(-1).sign(1, 1) == -1


def test_single_cell_for_one_row():
    part = build_partition(HyperbolicRegion(1, Fraction(1, 4), 1))
    assert len(part) == 1
    assert part.cells[0].k == ()
    assert part.cells[0].scales.tolist() == [1.0]
    assert part.locate([[0.1], [-0.2], [0.3]]).tolist() == [0, 0, -1]


def test_two_row_partition():
    part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
    assert (part.K, len(part), part.c) == (4, 5, Fraction(1, 2))
    for cell in part.cells:
        assert sum(cell.a, LogLinear()).is_zero()
    assert part.locate([[0.5, 0.01], [0.001, 0.5], [0.5, 0.5]]).tolist() == [0, 4, -1]
    assert cell_of(part, [0.9, 0.001]).k == (0,)
    # |x_1| in (T/e, T] is the first layer
    assert cell_of(part, [0.5, -0.001]).k == (0,)


def test_point_outside():
    part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
    with pytest.raises(NotInRegion):
        cell_of(part, [0.0, 0.001])


def test_partition_needs_room():
    with pytest.raises(PrecondViolation):
        build_partition(HyperbolicRegion(2, 1, 1))
    with pytest.raises(DomainError):
        HyperbolicRegion(0, Fraction(1, 10), 1)


@pytest.mark.parametrize('M, eps, T', [
    (1, Fraction(1, 100), 1),
    (2, Fraction(1, 100), 1),
    (2, 1, math.e ** 3),
    (3, Fraction(1, 1000), 1),
])
def test_coverage_and_containment(M, eps, T):
    region = HyperbolicRegion(M, eps, Fraction(T) if isinstance(T, int) else T)
    part = build_partition(region)
    points = sample_region(region, 5000, np.random.default_rng(7))
    idx = part.locate(points)
    assert np.all(idx >= 0)
    delta = region.delta.approx()
    scaled = np.array([part.cells[j].apply(x) for j, x in zip(idx, points)])
    assert np.all(np.abs(scaled) <= delta * (1 + 1e-9))
    assert len(part) <= 4 ** M * region.spread() ** (M - 1)


def test_extend_and_compose_single_cell():
    region = HyperbolicRegion(1, Fraction(1, 4), 1)
    part = build_partition(region)
    L = SystemMatrix.parse('sqrt(2)')
    basis = extend_and_compose(part.cells[0], L, BoxSpec([4]))
    V = basis.as_float()
    np.testing.assert_allclose(V, [[4.0, 0.0], [4 * math.sqrt(2), 0.25]], rtol=1e-12)
    assert float(basis.det) == pytest.approx(1.0)


def test_extend_and_compose_checks_arguments():
    part = build_partition(HyperbolicRegion(1, Fraction(1, 4), 1))
    L = SystemMatrix.parse('sqrt(2)')
    with pytest.raises(DomainError):
        extend_and_compose(part.cells[0], L, BoxSpec([4]), eps=Fraction(1, 8))
    with pytest.raises(DomainError):
        extend_and_compose(part.cells[0], SystemMatrix.parse('sqrt(2);sqrt(3)'), BoxSpec([4]))


def test_equal_sides_need_no_box_map():
    part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
    L = SystemMatrix.parse('sqrt(2),sqrt(3);sqrt(5),sqrt(7)')
    basis = extend_and_compose(part.cells[2], L, BoxSpec([3, 3]))
    nu = [basis.diagonal[2].approx(), basis.diagonal[3].approx()]
    assert nu[0] == pytest.approx(nu[1], rel=1e-15)


def test_davenport_bound_examples():
    report = successive_minima(standard_lattice(2))
    assert davenport_count_bound(report, [1, 1]) == 3
    assert davenport_count_bound(report, [3, 2]) == 10


@pytest.mark.parametrize('seed', range(5))
def test_davenport_bound_dominates(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    basis = random_lattice(rng, n)
    P = [int(p) for p in rng.integers(1, 4, size=n)]
    count = len(lattice_points_in_box(basis, P))
    bound = float(davenport_count_bound(successive_minima(basis), P))
    assert count <= 2 ** (n - 1) * (2 * math.sqrt(n) + 1) ** n * bound


@pytest.mark.parametrize('M', [1, 2, 3])
@pytest.mark.parametrize('eps, T', [(Fraction(1, 100), 1), (Fraction(1, 10 ** 9), 1),
                                    (Fraction(1, 1000), 5)])
def test_scale_floor_kappa(M, eps, T):
    part = build_partition(HyperbolicRegion(M, eps, T))
    assert part.kappa >= math.exp(-2 * M)
    delta = float(eps) ** (1 / M)
    for cell in part.cells:
        assert cell.scales.min() >= part.kappa * delta / T * (1 - 1e-9)
