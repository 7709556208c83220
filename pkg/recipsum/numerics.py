"""
Exact and high-precision real scalars.

Two kinds of :class:`RealScalar` are provided:

* :class:`ExactQuadratic`, the number (a + b*sqrt(d))/c with integers a, b,
  c, d. Arithmetic inside one quadratic field is exact, and so are
  comparisons, floors and distances to the nearest integer.
* :class:`BigDecimal`, a binary floating point number of explicit precision
  backed by the raw ``mpmath.libmp`` tuples. Every arithmetic result records
  whether rounding occurred.

Mixing values from different quadratic fields, or an exact value with a
decimal one, silently produces a :class:`BigDecimal`.

>>> x = parse_scalar('sqrt(2)')
>>> x * x
ExactQuadratic(2, 0, 1, 1)
>>> dist_to_nearest_int(3 * x)
ExactQuadratic(-4, 3, 1, 2)
>>> float(dist_to_nearest_int(x))
0.41421356237309...
>>> surd_sign(3, -2, 2)
1
"""

import logging
import math
import operator
import re
from fractions import Fraction
from functools import lru_cache, total_ordering

import mpmath.libmp as mlib
from mpmath.libmp import round_nearest

from .constants import DEFAULT_PRECISION, FLOAT_MARGIN_BITS, NAMED_ENTRIES
from .errors import DomainError, MixedFieldError

log = logging.getLogger(__name__)

# extra bits carried through compound decimal evaluations
GUARD_BITS = 32

_MARGIN = 2.0 ** -FLOAT_MARGIN_BITS


def surd_sign(a, b, d):
    """
    Sign of a + b*sqrt(d) by integer case analysis.

    >>> surd_sign(1, -1, 2), surd_sign(3, -2, 2), surd_sign(0, 0, 2)
    (-1, 1, 0)
    """
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0 or d == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger square wins
    lhs = a * a
    rhs = b * b * d
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


@lru_cache(maxsize=1024)
def _squarefree(d):
    """
    Split d = s**2 * r with r squarefree, returns (s, r).

    Trial division stops at _TRIAL_CAP. The cofactor left after removing
    the small primes is then resolved when it is a perfect square or has at
    most two prime factors; anything larger raises :class:`DomainError`.

    >>> _squarefree(72), _squarefree(3 * 20011 ** 2)
    ((6, 2), (20011, 3))
    """
    s = 1
    r = d
    p = 2
    while p * p <= r and p <= _TRIAL_CAP:
        while r % (p * p) == 0:
            r //= p * p
            s *= p
        p += 1
    if p * p > r:
        return s, r
    m = r
    for q in range(2, _TRIAL_CAP + 1):
        if m % q == 0:
            m //= q
    root = math.isqrt(m)
    if root > 1 and root * root == m:
        return s * root, r // m
    if m >= (_TRIAL_CAP + 1) ** 3:
        raise DomainError("cannot certify the squarefree part of %d" % d)
    return s, r


_TRIAL_CAP = 20000


def _isqrt_floor(b, d):
    """floor(b*sqrt(d)) for integers b and d >= 0."""
    if b >= 0:
        return math.isqrt(b * b * d)
    r = math.isqrt(b * b * d)
    # -b*sqrt(d) is irrational unless b*b*d is a square
    return -r if r * r == b * b * d else -r - 1


@total_ordering
class RealScalar(object):
    """
    Common interface of exact and decimal real scalars.

    Subclasses implement ``sign``, ``floor``, ``to_decimal`` and the exact
    kernels; operators dispatch through :func:`scalar` coercion.
    """

    __slots__ = ()
    exact = False
    prec = None

    def __add__(self, other):
        return _binary(self, other, 'add')

    def __radd__(self, other):
        return _binary(scalar(other), self, 'add')

    def __sub__(self, other):
        return _binary(self, other, 'sub')

    def __rsub__(self, other):
        return _binary(scalar(other), self, 'sub')

    def __mul__(self, other):
        return _binary(self, other, 'mul')

    def __rmul__(self, other):
        return _binary(scalar(other), self, 'mul')

    def __truediv__(self, other):
        return _binary(self, other, 'div')

    def __rtruediv__(self, other):
        return _binary(scalar(other), self, 'div')

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return 1 / (self ** -n)
            result = scalar(1)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return power(self, n)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pos__(self):
        return self

    def __eq__(self, other):
        try:
            other = scalar(other)
        except (TypeError, DomainError):
            return NotImplemented
        return compare(self, other) == 0

    def __lt__(self, other):
        return compare(self, scalar(other)) < 0

    def __hash__(self):
        return hash(self.to_fraction()) if self.is_rational() else hash(repr(self))

    def __float__(self):
        return mlib.to_float(self.to_decimal(64)._mpf)

    def __int__(self):
        return self.floor() if self.sign() >= 0 else -((-self).floor())

    def is_zero(self):
        return self.sign() == 0

    def nearest_int(self):
        """Integer p minimising |x - p|; ties resolve downwards."""
        n = self.floor()
        frac = self - n
        return n if (2 * frac - 1).sign() <= 0 else n + 1

    def dist(self):
        """Distance to the nearest integer."""
        frac = self - self.floor()
        other = 1 - frac
        return frac if (frac - other).sign() <= 0 else other

    def approx(self):
        """Double precision approximation, cached."""
        return float(self)


class ExactQuadratic(RealScalar):
    """
    The quadratic irrational (a + b*sqrt(d))/c in lowest terms.

    The radicand is reduced to its squarefree part on construction and is 1
    exactly when b is 0, so rationals are compatible with every field.

    >>> ExactQuadratic(2, 2, 4, 8)
    ExactQuadratic(1, 2, 2, 2)
    >>> ExactQuadratic(0, 1, 1, 8) == 2 * parse_scalar('sqrt(2)')
    True
    >>> print(ExactQuadratic(1, 1, 2, 5))
    (1+sqrt(5))/2
    >>> ExactQuadratic(1, 1, 0, 2)
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: denominator must be nonzero
    """

    __slots__ = ('a', 'b', 'c', 'd', '_float')
    exact = True

    def __init__(self, a, b=0, c=1, d=1):
        a, b, c, d = (operator.index(v) for v in (a, b, c, d))
        if c == 0:
            raise DomainError("denominator must be nonzero")
        if d < 0:
            raise DomainError("radicand must be nonnegative, got %d" % d)
        if b != 0:
            s, r = _squarefree(d)
            b *= s
            d = r
            if d == 1:
                a, b = a + b, 0
            elif d == 0:
                b = 0
        if b == 0:
            d = 1
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        self.a = a
        self.b = b
        self.c = c
        self.d = d
        self._float = None

    def __repr__(self):
        return 'ExactQuadratic(%d, %d, %d, %d)' % (self.a, self.b, self.c, self.d)

    def __str__(self):
        if self.b == 0:
            return str(self.a) if self.c == 1 else '%d/%d' % (self.a, self.c)
        surd = 'sqrt(%d)' % self.d
        if abs(self.b) != 1:
            surd = '%d*%s' % (abs(self.b), surd)
        if self.a == 0:
            num = ('-' if self.b < 0 else '') + surd
            bracket = False
        else:
            num = '%d%s%s' % (self.a, '-' if self.b < 0 else '+', surd)
            bracket = True
        if self.c == 1:
            return num
        return '(%s)/%d' % (num, self.c) if bracket or self.b < 0 else '%s/%d' % (num, self.c)

    def __reduce__(self):
        return self.__class__, (self.a, self.b, self.c, self.d)

    def is_rational(self):
        return self.b == 0

    def to_fraction(self):
        if self.b:
            raise DomainError("%s is irrational" % self)
        return Fraction(self.a, self.c)

    def compatible(self, other):
        """True when both values live in one quadratic field."""
        return self.b == 0 or other.b == 0 or self.d == other.d

    def sign(self):
        return surd_sign(self.a, self.b, self.d)

    def __neg__(self):
        return ExactQuadratic(-self.a, -self.b, self.c, self.d)

    def floor(self):
        """Exact floor by integer square roots and one surd comparison."""
        a, b, c, d = self.a, self.b, self.c, self.d
        n = (a + _isqrt_floor(b, d)) // c
        # the estimate is at most one below the floor
        while surd_sign(a - c * (n + 1), b, d) >= 0:
            n += 1
        return n

    def conjugate(self):
        return ExactQuadratic(self.a, -self.b, self.c, self.d)

    def norm(self):
        """Field norm, a rational."""
        return Fraction(self.a * self.a - self.b * self.b * self.d, self.c * self.c)

    def _exact(self, other, op):
        d = self.d if self.b else other.d
        a1, b1, c1 = self.a, self.b, self.c
        a2, b2, c2 = other.a, other.b, other.c
        if op == 'add':
            return ExactQuadratic(a1 * c2 + a2 * c1, b1 * c2 + b2 * c1, c1 * c2, d)
        if op == 'sub':
            return ExactQuadratic(a1 * c2 - a2 * c1, b1 * c2 - b2 * c1, c1 * c2, d)
        if op == 'mul':
            return ExactQuadratic(a1 * a2 + b1 * b2 * d, a1 * b2 + a2 * b1, c1 * c2, d)
        # division through the conjugate of the divisor
        den = a2 * a2 - b2 * b2 * d
        if den == 0:
            raise ZeroDivisionError("division by zero")
        na = (a1 * a2 - b1 * b2 * d) * c2
        nb = (b1 * a2 - a1 * b2) * c2
        return ExactQuadratic(na, nb, c1 * den, d)

    def to_decimal(self, prec=None):
        prec = prec or DEFAULT_PRECISION
        if self.b == 0:
            value = mlib.from_rational(self.a, self.c, prec, round_nearest)
            exact = mlib.from_rational(self.a, self.c, prec + GUARD_BITS, round_nearest)
            return BigDecimal(value, prec, inexact=value != exact or not _pow2(self.c))
        work = prec + GUARD_BITS
        root = mlib.mpf_sqrt(mlib.from_int(self.d), work, round_nearest)
        num = mlib.mpf_add(mlib.from_int(self.a), mlib.mpf_mul(mlib.from_int(self.b), root),
                           work, round_nearest)
        value = mlib.mpf_div(num, mlib.from_int(self.c), prec, round_nearest)
        return BigDecimal(value, prec, inexact=True)

    def approx(self):
        if self._float is None:
            if self.b == 0:
                self._float = self.a / self.c
            else:
                self._float = float(self)
        return self._float


def _pow2(n):
    return n > 0 and n & (n - 1) == 0


class BigDecimal(RealScalar):
    """
    Binary floating point number with an explicit precision in bits.

    The value is kept as a raw ``mpmath.libmp`` tuple ``(sign, mantissa,
    exponent, bitcount)``; ``inexact`` records whether rounding occurred
    anywhere in its history.

    >>> x = BigDecimal('0.5')
    >>> x.inexact, x.mantissa, x.exponent
    (False, 1, -1)
    >>> (x * 4).is_rational()
    True
    >>> BigDecimal('0.1').inexact
    True
    """

    __slots__ = ('_mpf', 'prec', 'inexact')

    def __init__(self, value, prec=None, inexact=False):
        prec = prec or DEFAULT_PRECISION
        if isinstance(value, tuple):
            raw = mlib.mpf_pos(value, prec, round_nearest)
            inexact = inexact or raw != value
        elif isinstance(value, bool):
            raise TypeError("bool is not a real scalar")
        elif isinstance(value, int):
            raw = mlib.from_int(value, prec, round_nearest)
            inexact = inexact or raw != mlib.from_int(value)
        elif isinstance(value, Fraction):
            raw = mlib.from_rational(value.numerator, value.denominator, prec, round_nearest)
            inexact = inexact or not (_pow2(value.denominator)
                                      and raw == mlib.from_rational(value.numerator,
                                                                    value.denominator,
                                                                    prec + GUARD_BITS,
                                                                    round_nearest))
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise DomainError("non-finite value %r" % value)
            raw = mlib.from_float(value, prec, round_nearest)
        elif isinstance(value, str):
            try:
                frac = Fraction(value.strip())
            except ValueError:
                raise DomainError("not a decimal number: %r" % value)
            raw = mlib.from_rational(frac.numerator, frac.denominator, prec, round_nearest)
            inexact = inexact or not _pow2(frac.denominator)
        else:
            raise TypeError("cannot build a BigDecimal from %r" % (value,))
        self._mpf = raw
        self.prec = prec
        self.inexact = bool(inexact)

    def __repr__(self):
        return "BigDecimal('%s', %d%s)" % (self, self.prec, ', inexact' if self.inexact else '')

    def __str__(self):
        return mlib.to_str(self._mpf, max(mlib.prec_to_dps(self.prec), 1))

    def __reduce__(self):
        return _rebuild_decimal, (self._mpf, self.prec, self.inexact)

    @property
    def sign_bit(self):
        return self._mpf[0]

    @property
    def mantissa(self):
        return int(self._mpf[1])

    @property
    def exponent(self):
        return int(self._mpf[2])

    def is_rational(self):
        # every finite binary float is a rational number
        return True

    def to_fraction(self):
        sign, man, exp, _ = self._mpf
        man = int(man)
        value = Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)
        return -value if sign else value

    def sign(self):
        return mlib.mpf_sign(self._mpf)

    def __neg__(self):
        return _wrap(mlib.mpf_neg(self._mpf), self.prec, self.inexact)

    def floor(self):
        return int(mlib.to_int(mlib.mpf_floor(self._mpf)))

    def to_decimal(self, prec=None):
        if prec is None or prec == self.prec:
            return self
        return BigDecimal(self._mpf, prec, self.inexact)

    def approx(self):
        return mlib.to_float(self._mpf)


def _wrap(raw, prec, inexact):
    out = BigDecimal.__new__(BigDecimal)
    out._mpf = raw
    out.prec = prec
    out.inexact = inexact
    return out


def _rebuild_decimal(raw, prec, inexact):
    return _wrap(raw, prec, inexact)


def _decimal_op(x, y, op):
    prec = max(x.prec or 0, y.prec or 0) or DEFAULT_PRECISION
    dx = x.to_decimal(prec)
    dy = y.to_decimal(prec)
    s, t = dx._mpf, dy._mpf
    if op == 'add':
        exact = mlib.mpf_add(s, t)
    elif op == 'sub':
        exact = mlib.mpf_sub(s, t)
    elif op == 'mul':
        exact = mlib.mpf_mul(s, t)
    else:
        if t == mlib.fzero:
            raise ZeroDivisionError("division by zero")
        value = mlib.mpf_div(s, t, prec, round_nearest)
        rounded = mlib.mpf_mul(value, t) != s
        return _wrap(value, prec, dx.inexact or dy.inexact or rounded)
    value = mlib.mpf_pos(exact, prec, round_nearest)
    return _wrap(value, prec, dx.inexact or dy.inexact or value != exact)


def _binary(x, y, op):
    y = scalar(y)
    if isinstance(x, ExactQuadratic) and isinstance(y, ExactQuadratic) and x.compatible(y):
        return x._exact(y, op)
    return _decimal_op(x, y, op)


def compare(x, y):
    """
    Three-way comparison, exact within one field and on stored decimals.

    >>> compare(parse_scalar('sqrt(2)'), Fraction(99, 70))
    -1
    """
    x = scalar(x)
    y = scalar(y)
    if isinstance(x, ExactQuadratic) and isinstance(y, ExactQuadratic) and x.compatible(y):
        return (x - y).sign()
    fx, fy = x.approx(), y.approx()
    if abs(fx - fy) > _MARGIN * max(abs(fx), abs(fy)):
        return 1 if fx > fy else -1
    prec = max(x.prec or 0, y.prec or 0) or DEFAULT_PRECISION
    dx, dy = x.to_decimal(prec), y.to_decimal(prec)
    return mlib.mpf_cmp(dx._mpf, dy._mpf)


def scalar(value, prec=None):
    """
    Coerce ints, fractions, floats, strings and scalars to a RealScalar.

    >>> scalar(Fraction(3, 6))
    ExactQuadratic(1, 0, 2, 1)
    >>> scalar('golden')
    ExactQuadratic(1, 1, 2, 5)
    """
    if isinstance(value, RealScalar):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a real scalar")
    if isinstance(value, int):
        return ExactQuadratic(value)
    if isinstance(value, Fraction):
        return ExactQuadratic(value.numerator, 0, value.denominator)
    if isinstance(value, float):
        return BigDecimal(value, prec)
    if isinstance(value, str):
        return parse_scalar(value, prec=prec)
    raise TypeError("cannot interpret %r as a real scalar" % (value,))


_SURD = re.compile(r"""^\s*
    (?P<open>\()?\s*
    (?P<a>[+-]?\s*\d+)?\s*
    (?:(?P<bsign>[+-])?\s*(?:(?P<b>\d+)\s*\*\s*)?sqrt\s*\(\s*(?P<d>\d+)\s*\))?\s*
    (?P<close>\))?\s*
    (?:/\s*(?P<c>\d+))?\s*$""", re.X)

_DECIMAL = re.compile(r'^\s*[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\s*$')


def parse_scalar(text, decimals='exact', prec=None):
    """
    Parse a matrix entry or parameter.

    Understood forms are integers, ``p/q`` fractions, ``sqrt(d)``,
    ``(a+b*sqrt(d))/c`` and its shorter variants, decimal literals and the
    named constants of :mod:`recipsum.constants`. Decimal literals become
    exact rationals unless ``decimals='big'``, in which case they are read
    as :class:`BigDecimal` values of precision ``prec``.

    >>> parse_scalar('(3-2*sqrt(8))/2')
    ExactQuadratic(3, -4, 2, 2)
    >>> parse_scalar('sqrt(9)')
    ExactQuadratic(3, 0, 1, 1)
    >>> parse_scalar('0.3')
    ExactQuadratic(3, 0, 10, 1)
    >>> parse_scalar('1.4142135623', decimals='big').inexact
    True
    >>> parse_scalar('sqrt(-2)')
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: cannot parse scalar 'sqrt(-2)'
    """
    raw = text.strip()
    key = raw.lower()
    if key in NAMED_ENTRIES:
        return ExactQuadratic(*NAMED_ENTRIES[key])
    if _DECIMAL.match(raw) and ('.' in raw or 'e' in key):
        if decimals == 'big':
            return BigDecimal(raw, prec)
        frac = Fraction(raw)
        return ExactQuadratic(frac.numerator, 0, frac.denominator)
    m = _SURD.match(raw)
    if m is None or (m.group('a') is None and m.group('d') is None) \
            or bool(m.group('open')) != bool(m.group('close')):
        raise DomainError("cannot parse scalar %r" % text)
    a = int(m.group('a').replace(' ', '')) if m.group('a') else 0
    c = int(m.group('c')) if m.group('c') else 1
    if m.group('d') is None:
        if m.group('bsign'):
            raise DomainError("cannot parse scalar %r" % text)
        return ExactQuadratic(a, 0, c)
    b = int(m.group('b')) if m.group('b') else 1
    if m.group('bsign') == '-':
        b = -b
    elif m.group('bsign') is None and m.group('a') is not None:
        raise DomainError("cannot parse scalar %r" % text)
    return ExactQuadratic(a, b, c, int(m.group('d')))


def to_decimal(x, prec=None):
    """``x`` as a BigDecimal of precision ``prec``."""
    return scalar(x).to_decimal(prec or DEFAULT_PRECISION)


def floor(x):
    return scalar(x).floor()


def nearest_int(x):
    return scalar(x).nearest_int()


def dist_to_nearest_int(x):
    """
    Distance ||x|| from x to the nearest integer, in [0, 1/2].

    Exact for ExactQuadratic input: the floor comes from integer square
    roots and the half-way test is a surd sign.

    >>> dist_to_nearest_int(3), dist_to_nearest_int(Fraction(1, 2))
    (ExactQuadratic(0, 0, 1, 1), ExactQuadratic(1, 0, 2, 1))
    >>> dist_to_nearest_int(parse_scalar('sqrt(2)'))
    ExactQuadratic(-1, 1, 1, 2)
    """
    return scalar(x).dist()


def row_value(L_row, q, exact=False, prec=None):
    """
    The linear form sum_j L_row[j] * q[j].

    Exact when all entries share one quadratic field; otherwise
    :class:`MixedFieldError` when ``exact`` is set, else a BigDecimal.

    >>> r = [parse_scalar('sqrt(2)'), parse_scalar('1+sqrt(2)')]
    >>> row_value(r, [1, -1])
    ExactQuadratic(-1, 0, 1, 1)
    >>> row_value([parse_scalar('sqrt(2)'), parse_scalar('sqrt(3)')], [1, 1], exact=True)
    Traceback (most recent call last):
        ...
    recipsum.errors.MixedFieldError: row mixes the fields Q(sqrt(2)) and Q(sqrt(3))
    """
    if len(L_row) != len(q):
        raise DomainError("row has %d entries but q has %d" % (len(L_row), len(q)))
    entries = [scalar(e) for e in L_row]
    field = common_field(entries)
    if field is not None:
        total = ExactQuadratic(0)
        for e, n in zip(entries, q):
            if n:
                total = total._exact(e._exact(ExactQuadratic(n), 'mul'), 'add')
        return total
    if exact:
        fields = sorted({e.d for e in entries if isinstance(e, ExactQuadratic) and e.b})
        if len(fields) >= 2:
            raise MixedFieldError("row mixes the fields Q(sqrt(%d)) and Q(sqrt(%d))"
                                  % (fields[0], fields[1]))
        raise MixedFieldError("row contains decimal entries")
    prec = prec or max([e.prec or 0 for e in entries] + [DEFAULT_PRECISION])
    work = prec + GUARD_BITS
    acc = mlib.fzero
    inexact = False
    for e, n in zip(entries, q):
        if n:
            de = e.to_decimal(work)
            inexact = inexact or de.inexact
            acc = mlib.mpf_add(acc, mlib.mpf_mul(de._mpf, mlib.from_int(n)))
    return BigDecimal(acc, prec, inexact)


def common_field(entries):
    """Radicand shared by all exact entries, 1 for rationals, else None."""
    d = 1
    for e in entries:
        if not isinstance(e, ExactQuadratic):
            return None
        if e.b:
            if d not in (1, e.d):
                return None
            d = e.d
    return d


def sqrt(x, prec=None):
    """
    Square root; exact (a surd) for rational input.

    >>> sqrt(Fraction(1, 2))
    ExactQuadratic(0, 1, 2, 2)
    >>> sqrt(Fraction(9, 4))
    ExactQuadratic(3, 0, 2, 1)
    """
    prec = prec or DEFAULT_PRECISION
    x = scalar(x)
    if x.sign() < 0:
        raise DomainError("square root of a negative number")
    if isinstance(x, ExactQuadratic) and x.b == 0:
        # sqrt(a/c) = sqrt(a*c)/c
        return ExactQuadratic(0, 1, x.c, x.a * x.c)
    dx = x.to_decimal(prec + GUARD_BITS)
    value = mlib.mpf_sqrt(dx._mpf, prec, round_nearest)
    return _wrap(value, prec, dx.inexact or mlib.mpf_mul(value, value) != dx._mpf)


def log(x, prec=None):
    prec = prec or DEFAULT_PRECISION
    x = scalar(x)
    if x.sign() <= 0:
        raise DomainError("logarithm of a nonpositive number")
    dx = x.to_decimal(prec + GUARD_BITS)
    exact_one = dx._mpf == mlib.fone
    return _wrap(mlib.mpf_log(dx._mpf, prec, round_nearest), prec, not exact_one)


def exp(x, prec=None):
    prec = prec or DEFAULT_PRECISION
    dx = scalar(x).to_decimal(prec + GUARD_BITS)
    exact_zero = dx._mpf == mlib.fzero
    return _wrap(mlib.mpf_exp(dx._mpf, prec, round_nearest), prec, not exact_zero)


def power(x, r, prec=None):
    """
    x ** r for x > 0 and a rational (or integer) exponent r.

    >>> float(power(Fraction(1, 4), Fraction(1, 2)))
    0.5
    """
    prec = prec or DEFAULT_PRECISION
    r = Fraction(r)
    if r.denominator == 1:
        return scalar(x) ** int(r)
    x = scalar(x)
    if x.sign() <= 0:
        raise DomainError("fractional power of a nonpositive number")
    if isinstance(x, ExactQuadratic) and x.b == 0:
        num = _iroot(x.a, r.denominator)
        den = _iroot(x.c, r.denominator)
        if num is not None and den is not None:
            return ExactQuadratic(num, 0, den) ** r.numerator
    work = prec + GUARD_BITS
    lx = log(x, work)
    scaled = mlib.mpf_div(mlib.mpf_mul(lx._mpf, mlib.from_int(r.numerator)),
                          mlib.from_int(r.denominator), work, round_nearest)
    return _wrap(mlib.mpf_exp(scaled, prec, round_nearest), prec, True)


def _iroot(n, k):
    """The exact k-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else None
    if r is None:
        lo, hi = 0, 1 << (n.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** k <= n:
                lo = mid
            else:
                hi = mid - 1
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def certify_irrational(rows):
    """
    Per-row verdict on whether ||L_i q|| can vanish for nonzero q.

    ``'certified'`` rows consist of surds with pairwise distinct radicands,
    which together with 1 are linearly independent over the rationals.
    ``'flagged'`` rows contain a rational entry or repeat a field, and
    ``'assumed'`` rows contain decimals that cannot be decided.

    >>> s = parse_scalar
    >>> certify_irrational([[s('sqrt(2)'), s('sqrt(3)')], [s('sqrt(2)'), s('1+sqrt(2)')]])
    ['certified', 'flagged']
    """
    verdicts = []
    for row in rows:
        entries = [scalar(e) for e in row]
        if any(not isinstance(e, ExactQuadratic) for e in entries):
            verdicts.append('assumed')
            continue
        fields = [e.d for e in entries if e.b]
        if len(fields) == len(entries) and len(set(fields)) == len(fields):
            verdicts.append('certified')
        else:
            verdicts.append('flagged')
    return verdicts


def certified_sign(approx, scale, exact):
    """
    Sign of a quantity known approximately, falling back to exact work.

    ``approx`` is a float evaluation whose error is tiny compared to
    ``scale`` (the magnitude of the terms that produced it); ``exact`` is
    a callable returning the quantity as a RealScalar. The callable only
    runs when the float cannot decide.

    >>> certified_sign(0.5, 1.0, None)
    1
    >>> certified_sign(0.0, 1.0, lambda: parse_scalar('sqrt(2)') - Fraction(99, 70))
    -1
    """
    tol = _MARGIN * scale
    if approx > tol:
        return 1
    if approx < -tol:
        return -1
    return exact().sign()
