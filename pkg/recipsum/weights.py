"""
Weights attached to the supports of a normalized basis.

The support matrix t has one row per basis vector v_1, ..., v_(M+N-1);
t[s][j] is 1 when the y coordinate j of v_s is nonzero. Each row gets a
weight sum k_s, and the running sums alpha_s = 1/k_1 + ... + 1/k_s must
satisfy

    alpha_s (s + 1) + sum_(j > s + 1 - M) alpha_sj = s,    M <= s < M + N,

where alpha_sj = t_1j/k_1 + ... + t_sj/k_s. All arithmetic is done in
fractions.

>>> table = WeightTable([[1, 0], [1, 1]], 1)
>>> table.k
(Fraction(2, 1), Fraction(6, 1))
>>> table.alpha[-1]
Fraction(2, 3)
>>> verify_weight_lemma(table).ok
True
"""

import itertools
import logging
import math
from fractions import Fraction

import pandas as pd

from .errors import DomainError, InvariantViolation, PrecondViolation

log = logging.getLogger(__name__)


def _fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else '%d/%d' % (x.numerator, x.denominator)


def prefix_lengths(t):
    """
    h_s, the largest j with t[s][j] = 1 (0 for an empty row).

    >>> prefix_lengths([[1, 0, 0], [1, 1, 0], [1, 0, 1]])
    (1, 2, 3)
    """
    out = []
    for row in t:
        ones = [j for j, bit in enumerate(row, start=1) if bit]
        out.append(ones[-1] if ones else 0)
    return tuple(out)


def is_prefix_row(row):
    h = prefix_lengths([row])[0]
    return all(row[:h]) and not any(row[h:])


def support_matrix(nb):
    """
    The y part of the supports of v_1, ..., v_(M+N-1) as a bit matrix.

    The basis must have been permuted so that supports are prefixes.

    >>> from recipsum.normal import NormalizedBasis
    >>> nb = NormalizedBasis([[1, 1, 0], [1, 1, 1], [1, 1, 1]], [[1, 0, 0]] * 3, 1, None)
    >>> support_matrix(nb)
    ((1, 0), (1, 1))
    """
    M = nb.M
    N = nb.dim - M
    t = []
    for s, mask in enumerate(nb.supports[:-1], start=1):
        row = tuple((mask >> (M + j)) & 1 for j in range(N))
        if not any(row):
            raise PrecondViolation("vector %d has q = 0; use the q = 0 case" % s)
        if not is_prefix_row(row):
            raise PrecondViolation("support of vector %d is not a prefix: %s" % (s, row))
        t.append(row)
    return tuple(t)


def weight_sums(t, h, M):
    """
    Weight sums k_s: M + h_s for s <= M, and for s > M

        k_s = (M + h_s) / (1 - sum_(s' < s) (1 - t[s'][s + 1 - M]) / k_s').

    >>> weight_sums([[1, 1], [1, 1]], (2, 2), 1)
    (Fraction(3, 1), Fraction(3, 1))
    >>> weight_sums([[0, 0], [1, 1]], (0, 2), 1)
    Traceback (most recent call last):
        ...
    recipsum.errors.InvariantViolation: weight denominator 0 at s = 2
    """
    k = []
    for s, hs in enumerate(h, start=1):
        base = Fraction(M + hs)
        if s <= M:
            k.append(base)
            continue
        j = s - M  # column s + 1 - M, 0-based
        extra = sum((1 - t[r][j]) / k[r] for r in range(s - 1))
        denom = 1 - extra
        if denom <= 0:
            raise InvariantViolation("weight denominator %s at s = %d" % (_fmt(denom), s))
        k.append(base / denom)
    return tuple(k)


def alphas(k, t):
    """
    Running sums alpha_s and the column sums alpha_sj.

    >>> a, a_sj = alphas((Fraction(2), Fraction(6)), [[1, 0], [1, 1]])
    >>> a
    (Fraction(1, 2), Fraction(2, 3))
    >>> a_sj[1]
    (Fraction(2, 3), Fraction(1, 6))
    """
    N = len(t[0]) if t else 0
    alpha = []
    alpha_sj = []
    acc = Fraction(0)
    col = [Fraction(0)] * N
    for ks, row in zip(k, t):
        acc += 1 / ks
        col = [c + bit / ks for c, bit in zip(col, row)]
        alpha.append(acc)
        alpha_sj.append(tuple(col))
    return tuple(alpha), tuple(alpha_sj)


class WeightTable(object):
    """
    Support matrix together with its prefix lengths, weight sums and
    running sums.

    >>> WeightTable([[1], [1]], 2).k
    (Fraction(3, 1), Fraction(3, 1))
    """

    def __init__(self, t, M):
        t = tuple(tuple(int(bool(b)) for b in row) for row in t)
        if not t:
            raise DomainError("support matrix is empty")
        if len({len(row) for row in t}) != 1:
            raise DomainError("support matrix rows differ in length")
        self.M = M
        self.N = len(t[0])
        if len(t) != M + self.N - 1:
            raise DomainError("support matrix needs %d rows for M=%d, N=%d, got %d"
                              % (M + self.N - 1, M, self.N, len(t)))
        self.t = t
        self.h = prefix_lengths(t)
        self.k = weight_sums(t, self.h, M)
        self.alpha, self.alpha_sj = alphas(self.k, t)

    def __repr__(self):
        return 'WeightTable(%r, %d)' % ([list(r) for r in self.t], self.M)

    def to_record(self):
        return {
            'M': self.M,
            'N': self.N,
            't': [list(r) for r in self.t],
            'h': list(self.h),
            'k': [_fmt(x) for x in self.k],
            'alpha': [_fmt(x) for x in self.alpha],
            'alpha_sj': [[_fmt(x) for x in row] for row in self.alpha_sj],
        }


def table_from_basis(nb, M=None):
    """WeightTable of a normalized basis."""
    M = nb.M if M is None else M
    return WeightTable(support_matrix(nb), M)


class WeightReport(object):
    """Outcome of every check run by :func:`verify_weight_lemma`."""

    def __init__(self, table, part_i, part_ii, balance, theta_identity):
        self.table = table
        self.part_i = tuple(part_i)
        self.part_ii = tuple(part_ii)
        self.balance = tuple(balance)
        self.theta_identity = tuple(theta_identity)

    def __repr__(self):
        return '<WeightReport ok=%s failures=%s>' % (self.ok, self.failures())

    @property
    def ok(self):
        return all(self.part_i + self.part_ii + self.balance + self.theta_identity)

    def failures(self):
        out = []
        for name in ('part_i', 'part_ii', 'balance', 'theta_identity'):
            out.extend('%s[%d]' % (name, i) for i, good in enumerate(getattr(self, name))
                       if not good)
        return out

    def to_record(self):
        rec = self.table.to_record()
        rec.update({'ok': self.ok, 'failures': self.failures()})
        return rec


def verify_weight_lemma(table):
    """
    Exact checks on a weight table.

    * k_s >= M + h_s for every s;
    * alpha_s (s + 1) + sum_(j > s + 1 - M) alpha_sj = s for M <= s < M + N,
      hence alpha_s <= s/(s + 1);
    * the balance sum_(s' < s) (1 - t[s'][s + 1 - M])/k_s' + 1/k_s
      = (1 + k_s - M - h_s)/k_s for M < s < M + N;
    * sum_(s' <= s) (M/k_s') (1 - (k_s' - M)/N) = M (M + N)/N alpha_s - M s/N.

    >>> verify_weight_lemma(WeightTable([[1, 0], [1, 0]], 1)).failures()
    ['part_ii[1]']
    """
    M, N = table.M, table.N
    t, h, k = table.t, table.h, table.k
    alpha, alpha_sj = table.alpha, table.alpha_sj
    part_i = [ks >= M + hs for ks, hs in zip(k, h)]
    part_ii = []
    for s in range(M, M + N):
        i = s - 1
        lhs = alpha[i] * (s + 1) + sum(alpha_sj[i][s + 1 - M:])
        good = lhs == s and alpha[i] <= Fraction(s, s + 1)
        if not good:
            log.debug("part ii fails at s=%d: %s != %d", s, lhs, s)
        part_ii.append(good)
    balance = []
    for s in range(M + 1, M + N):
        j = s - M
        left = sum((1 - t[r][j]) / k[r] for r in range(s - 1)) + 1 / k[s - 1]
        balance.append(left == (1 + k[s - 1] - M - h[s - 1]) / k[s - 1])
    theta_identity = []
    acc = Fraction(0)
    for s, ks in enumerate(k, start=1):
        acc += Fraction(M) / ks * (1 - (ks - M) / Fraction(N))
        theta_identity.append(acc == Fraction(M * (M + N), N) * alpha[s - 1] - Fraction(M * s, N))
    return WeightReport(table, part_i, part_ii, balance, theta_identity)


def valid_support_matrices(M, N):
    """
    Every support matrix a quick-case basis can produce: prefix rows,
    nested supports, first column ones, and t[s][j] = 1 for j <= s + 1 - M.

    >>> [t for t in valid_support_matrices(1, 2)]
    [((1, 0), (1, 1)), ((1, 1), (1, 1))]
    """
    n = M + N - 1
    for h in itertools.combinations_with_replacement(range(1, N + 1), n):
        if all(hs >= s + 1 - M for s, hs in enumerate(h, start=1)):
            yield tuple(tuple(1 if j < hs else 0 for j in range(N)) for hs in h)


def exhaustive_check(M, N):
    """
    :func:`verify_weight_lemma` on every valid support matrix.

    >>> frame = exhaustive_check(2, 2)
    >>> len(frame), bool(frame['ok'].all())
    (3, True)
    """
    rows = []
    for t in valid_support_matrices(M, N):
        table = WeightTable(t, M)
        report = verify_weight_lemma(table)
        rows.append({
            'M': M,
            'N': N,
            't': ' '.join(''.join(str(b) for b in row) for row in t),
            'k': ' '.join(_fmt(x) for x in table.k),
            'alpha': _fmt(table.alpha[-1]),
            'ok': report.ok,
            'failures': ' '.join(report.failures()),
        })
    frame = pd.DataFrame(rows)
    log.info("checked %d support matrices for M=%d, N=%d", len(frame), M, N)
    return frame


def bit_flip_monotone(table):
    """
    Whether k_s strictly drops when one bit t[s'][s + 1 - M] it reads
    flips from 0 to 1, the earlier weight sums held fixed.

    >>> bit_flip_monotone(WeightTable([[1, 0], [1, 1]], 1))
    True
    """
    M, N = table.M, table.N
    t, k = table.t, table.k
    for s in range(M + 1, M + N):
        j = s - M
        extra = sum((1 - t[r][j]) / k[r] for r in range(s - 1))
        for r in range(s - 1):
            if t[r][j]:
                continue
            flipped = extra - 1 / k[r]
            k_new = (M + table.h[s - 1]) / (1 - flipped)
            if not k_new < k[s - 1]:
                log.debug("flip of t[%d][%d] does not lower k_%d", r + 1, j + 1, s)
                return False
    return True


def _exact_power_le(base, exp_num, terms):
    """Whether prod x_i^num_i <= base^exp_num."""
    lhs = Fraction(1)
    for x, num in terms:
        lhs *= Fraction(x) ** num
    return lhs <= Fraction(base) ** exp_num


def weighted_am_gm(x, w):
    """
    Two readings of the weighted AM-GM inequality with k = sum w_i:

    * as normalised by the number of terms, (sum x_i)/k >= prod x_i^(w_i/k);
    * the standard form, (sum w_i x_i)/k >= prod x_i^(w_i/k).

    Returns the pair of truth values, decided exactly for rational input.

    >>> weighted_am_gm([1, 1], [3, 1])
    (False, True)
    >>> weighted_am_gm([2, 8], [1, 1])
    (True, True)
    """
    x = [Fraction(v) for v in x]
    w = [Fraction(v) for v in w]
    if len(x) != len(w) or not x:
        raise DomainError("need as many weights as terms")
    if any(v <= 0 for v in x) or any(v <= 0 for v in w):
        raise DomainError("terms and weights must be positive")
    k = sum(w)
    # raise both sides to the power den to clear the exponents w_i/k
    den = 1
    for wi in w:
        den = den * (wi / k).denominator // math.gcd(den, (wi / k).denominator)
    terms = [(xi, int(wi / k * den)) for xi, wi in zip(x, w)]
    plain = _exact_power_le(sum(x) / k, den, terms)
    standard = _exact_power_le(sum(wi * xi for wi, xi in zip(w, x)) / k, den, terms)
    return plain, standard
