from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from recipsum.constants import working_precision
from recipsum.errors import ConfigError, DomainError, MixedFieldError
from recipsum.numerics import (BigDecimal, ExactQuadratic, certified_sign, compare,
                               dist_to_nearest_int, parse_scalar, power, row_value, sqrt,
                               surd_sign, to_decimal)

quadratics = st.builds(ExactQuadratic,
                       st.integers(-60, 60), st.integers(-60, 60),
                       st.integers(1, 25), st.sampled_from([2, 3, 5, 6, 7, 11]))


def test_dist_small_cases():
    assert dist_to_nearest_int(3) == 0
    assert dist_to_nearest_int(Fraction(1, 2)) == Fraction(1, 2)
    root2 = parse_scalar('sqrt(2)')
    assert dist_to_nearest_int(root2) == root2 - 1
    assert float(dist_to_nearest_int(root2)) == pytest.approx(0.414214, abs=1e-6)


def test_dist_golden():
    assert dist_to_nearest_int(parse_scalar('golden')) == ExactQuadratic(3, -1, 2, 5)


def test_surd_sign():
    assert surd_sign(1, -1, 2) == -1
    assert surd_sign(3, -2, 2) == 1
    assert surd_sign(0, 0, 2) == 0
    # 7^2 = 49 against 5^2 * 2 = 50
    assert surd_sign(7, -5, 2) == -1


def test_row_value():
    root2 = parse_scalar('sqrt(2)')
    assert row_value([root2], [3]) == ExactQuadratic(0, 3, 1, 2)
    assert row_value([root2, parse_scalar('1+sqrt(2)')], [1, -1]) == -1
    assert row_value([parse_scalar('0.5')], [4]) == 2


def test_row_value_mixed_fields():
    row = [parse_scalar('sqrt(2)'), parse_scalar('sqrt(3)')]
    with pytest.raises(MixedFieldError):
        row_value(row, [1, 1], exact=True)
    value = row_value(row, [1, 1])
    assert isinstance(value, BigDecimal)
    assert value.inexact
    assert value.approx() == pytest.approx(2 ** 0.5 + 3 ** 0.5)


def test_parse_grammar():
    assert parse_scalar('1+sqrt(6)') == ExactQuadratic(1, 1, 1, 6)
    assert parse_scalar('sqrt(11)/2') == ExactQuadratic(0, 1, 2, 11)
    assert parse_scalar('golden') == ExactQuadratic(1, 1, 2, 5)
    assert parse_scalar('3/4') == Fraction(3, 4)
    assert parse_scalar('sqrt(8)') == ExactQuadratic(0, 2, 1, 2)


@pytest.mark.parametrize('text', ['', 'sqrt(-2)', '1+', 'pi', '(1+sqrt(2)', '2 sqrt(3)'])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        parse_scalar(text)


def test_mixed_fields_become_decimal():
    x = parse_scalar('sqrt(2)') + parse_scalar('sqrt(3)')
    assert isinstance(x, BigDecimal)
    assert x.inexact


def test_decimal_precision_propagates():
    x = BigDecimal(1, 256) + BigDecimal(1, 128)
    assert x.prec == 256
    assert not x.inexact
    assert BigDecimal('0.1').inexact


def test_high_precision_square():
    x = parse_scalar('sqrt(2)').to_decimal(256)
    err = x * x - 2
    assert abs(err.approx()) < 2.0 ** -250


def test_power_exact_rational_root():
    assert power(Fraction(1, 4), Fraction(1, 2)) == Fraction(1, 2)
    assert isinstance(power(Fraction(1, 4), Fraction(1, 2)), ExactQuadratic)
    assert float(power(2, Fraction(1, 3))) == pytest.approx(2 ** (1 / 3))


def test_sqrt_negative():
    with pytest.raises(DomainError):
        sqrt(-1)


def test_certified_sign_skips_exact_when_clear():
    def explode():
        raise AssertionError('exact path should not run')

    assert certified_sign(0.25, 1.0, explode) == 1
    assert certified_sign(-0.25, 1.0, explode) == -1
    assert certified_sign(0.0, 1.0, lambda: ExactQuadratic(0)) == 0


def test_compare_close_values():
    root2 = parse_scalar('sqrt(2)')
    assert compare(root2, Fraction(99, 70)) == -1
    assert compare(root2, Fraction(140, 99)) == 1


@given(quadratics)
def test_floor_brackets_value(x):
    n = x.floor()
    assert compare(n, x) <= 0
    assert compare(x, n + 1) < 0


@given(quadratics)
def test_dist_matches_float(x):
    d = dist_to_nearest_int(x)
    assert compare(d, 0) >= 0
    assert compare(d, Fraction(1, 2)) <= 0
    fx = float(x)
    assert float(d) == pytest.approx(abs(fx - round(fx)), abs=1e-9)


@given(quadratics, quadratics)
def test_exact_arithmetic_in_one_field(x, y):
    if x.d != y.d and x.b and y.b:
        return
    assert (x + y) - y == x
    assert float(x * y) == pytest.approx(float(x) * float(y), rel=1e-9, abs=1e-9)


def test_working_precision_from_env():
    assert working_precision({'RECIPSUM_PRECISION': '320'}) == 320
    with pytest.raises(ConfigError):
        working_precision({'RECIPSUM_PRECISION': 'lots'})


@given(quadratics, st.integers(-1000, 1000))
def test_dist_shift_and_reflection(x, n):
    d = dist_to_nearest_int(x)
    assert compare(dist_to_nearest_int(x + n), d) == 0
    assert compare(dist_to_nearest_int(-x), d) == 0


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6),
       st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 101]))
def test_surd_sign_matches_decimal(a, b, d):
    value = BigDecimal(a, 512) + BigDecimal(b, 512) * sqrt(BigDecimal(d, 512), 512)
    assert surd_sign(a, b, d) == value.sign()


@given(quadratics)
def test_quadratic_matches_decimal(x):
    root = sqrt(BigDecimal(x.d, 256), 256)
    value = (BigDecimal(x.a, 256) + BigDecimal(x.b, 256) * root) / BigDecimal(x.c, 256)
    err = (to_decimal(x, 256) - value).to_fraction()
    assert abs(err) < Fraction(1, 2 ** 200)


def test_large_square_factor_in_radicand():
    assert ExactQuadratic(0, 1, 1, 3 * 20011 ** 2) == ExactQuadratic(0, 20011, 1, 3)
    # two large primes, no square part
    assert ExactQuadratic(0, 1, 1, 20011 * 20021).d == 20011 * 20021
    with pytest.raises(DomainError):
        ExactQuadratic(0, 1, 1, 20011 ** 3)
