import itertools
import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from recipsum.counting import CountInstance, count_M_direct
from recipsum.errors import DivisionByZero, PrecondViolation
from recipsum.lattice import BoxSpec, SystemMatrix
from recipsum.numerics import BigDecimal, ExactQuadratic, compare
from recipsum.sums import (DistanceTable, dyadic_counts, dyadic_terms, dyadic_upper,
                           empirical_phi, envelope, fit_constants, phi_profile, shape_box,
                           shape_probe, sum_reciprocals, sum_report, sweep, truncation_index)


def frac_dist(x):
    return abs(x - round(x))


def test_single_term_pair():
    report = sum_reciprocals(SystemMatrix.parse('sqrt(2)'), [1])
    assert report.value == ExactQuadratic(2, 2, 1, 2)
    assert float(report.value) == pytest.approx(4.828427, abs=1e-6)
    assert report.terms == 2


def test_sum_against_floats():
    value = sum_reciprocals('sqrt(2)', [10]).value
    brute = sum(2 / frac_dist(q * math.sqrt(2)) for q in range(1, 11))
    assert float(value) == pytest.approx(brute, rel=1e-9)


def test_unit_box_two_columns():
    value = sum_reciprocals('sqrt(2),sqrt(3)', [1, 1]).value
    brute = sum(1 / frac_dist(a * math.sqrt(2) + b * math.sqrt(3))
                for a, b in itertools.product((-1, 0, 1), repeat=2) if a or b)
    assert float(value) == pytest.approx(brute, rel=1e-9)


def test_exact_and_decimal_sums_agree():
    exact = sum_reciprocals('golden', [30], exact=True).value
    approx = sum_reciprocals('golden', [30], exact=False).value
    assert isinstance(approx, BigDecimal)
    assert float(exact) == pytest.approx(float(approx), rel=1e-15)


def test_rational_row_divides_by_zero():
    with pytest.raises(DivisionByZero) as info:
        sum_reciprocals('1/2', [3])
    assert info.value.q == (2,)


def test_distance_table_halves_box():
    table = DistanceTable('sqrt(2)', [5])
    assert len(table) == 5
    assert all(q[0] > 0 for q in table.points)


def test_truncation_index():
    assert truncation_index(BoxSpec([8]), Fraction(381966, 10 ** 6)) == 4
    assert truncation_index(BoxSpec([1]), 2) == -1


def test_dyadic_bound_dominates():
    for Q in (4, 16, 40):
        report = sum_report('sqrt(2)', [Q])
        assert report.phi_source == 'empirical'
        assert compare(report.value, report.dyadic) <= 0
        assert report.lower < report.upper


def test_dyadic_needs_honest_phi():
    with pytest.raises(PrecondViolation):
        dyadic_upper('golden', [8], 10)


def test_dyadic_terms():
    L = SystemMatrix.parse('sqrt(2)')
    box = BoxSpec([16])
    phi = empirical_phi(L, box)
    frame = dyadic_terms(L, box, phi)
    assert len(frame) == truncation_index(box, phi) + 1
    assert frame['weighted'].sum() == dyadic_upper(L, box, phi)
    assert list(frame['part'][:3]) == ['head'] * 3
    assert frame.loc[frame['part'] == 'tail', 'estimate'].notna().all()


def test_envelope():
    lo, up = envelope('sqrt(2)', [4], Fraction(2, 5))
    assert float(lo) == pytest.approx(4 * math.log(4), rel=1e-12)
    assert float(up) == pytest.approx(4 * math.log(10) + 10, rel=1e-12)
    with pytest.raises(PrecondViolation):
        envelope('sqrt(2)', [1], Fraction(2, 5))


def test_phi_profile_golden():
    profile = phi_profile('golden', [1, 10, 100, 1000])
    assert all(v == ExactQuadratic(3, -1, 2, 5) for v in profile.values)
    assert profile.argmins[-1] == (1,)
    assert profile.nonincreasing


def test_phi_profile_sqrt2():
    profile = phi_profile('sqrt(2)', [1, 2, 50])
    assert float(profile.at(1)) == pytest.approx(math.sqrt(2) - 1)
    assert float(profile.at(2)) == pytest.approx(0.343146, abs=1e-6)
    assert profile.nonincreasing
    brute = min(q * frac_dist(q * math.sqrt(2)) for q in range(1, 51))
    assert float(profile.values[-1]) == pytest.approx(brute, rel=1e-9)
    frame = profile.to_frame()
    assert list(frame.columns) == ['X', 'phi', 'argmin', 'weight']


def test_phi_profile_weighted_box():
    # the weighted box reaches q = (9, 1) at X = 3 although max |q_j| > 3
    profile = phi_profile('sqrt(2),sqrt(3)', [3])
    L = (math.sqrt(2), math.sqrt(3))
    brute = min(max(1, abs(a)) * max(1, abs(b)) * frac_dist(a * L[0] + b * L[1])
                for a in range(-9, 10) for b in range(-9, 10)
                if (a or b) and max(1, abs(a)) * max(1, abs(b)) <= 9)
    assert float(profile.values[0]) == pytest.approx(brute, rel=1e-9)


def test_phi_profile_grid_checks():
    with pytest.raises(PrecondViolation):
        phi_profile('sqrt(2)', [4, 2])
    with pytest.raises(PrecondViolation):
        phi_profile('sqrt(2)', [])


def test_sweep_table():
    frame = sweep('golden', [[4], [8], [16]])
    assert len(frame) == 3
    for column in ('Q1', 'Qgeo', 'S', 'lower', 'upper', 'dyadic', 'c_low', 'c_up'):
        assert column in frame.columns
    assert (frame['S'] <= frame['dyadic']).all()
    assert (frame['phi_source'] == 'empirical').all()


def test_shapes():
    assert shape_box(4, 2, 'sym') == [4, 4]
    assert shape_box(4, 2, 'skew') == [16, 1]
    assert shape_box(4, 2, 'skew-rev') == [1, 16]
    with pytest.raises(PrecondViolation):
        shape_box(4, 2, 'round')


def test_shape_probe():
    frame = shape_probe('sqrt(2),sqrt(3)', [2, 3])
    assert len(frame) == 6
    assert set(frame['shape']) == {'sym', 'skew', 'skew-rev'}
    assert (frame['band'] >= 1).all()
    assert np.isfinite(frame['ratio']).all()


def test_fit_constants():
    frame = pd.DataFrame({'S': [2.0, 8.0], 'lower': [1.0, 2.0], 'upper': [4.0, 8.0]})
    fit = fit_constants(frame)
    assert fit['c_low'] == pytest.approx(math.sqrt(8))
    assert fit['band_low'] == pytest.approx(2.0)
    assert fit['band_up'] == pytest.approx(2.0)


@pytest.mark.parametrize('L, Q', [('sqrt(2)', [12]), ('golden', [9]),
                                  ('sqrt(2),sqrt(3)', [3, 3]), ('sqrt(2);sqrt(3)', [6])])
def test_dyadic_counts_match_direct(L, Q):
    counts = dyadic_counts(DistanceTable(L, Q), 5)
    direct = [count_M_direct(CountInstance(L, Fraction(1, 2 ** k), Fraction(1, 2), Q))
              for k in range(6)]
    assert counts == direct


def test_shape_band_is_bounded():
    frame = shape_probe('sqrt(2),sqrt(3)', [4, 8, 16])
    assert len(frame) == 9
    assert frame['band'].iloc[0] <= 4
