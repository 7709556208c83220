"""
Normalized lattice bases.

A :class:`NormalizedBasis` is built in three stages:

1. :func:`mahler_weyl_basis` completes the successive-minima witnesses to a
   basis with ``|v_s| <= max(1, s/2) lambda_s``;
2. :func:`nest_supports` replaces ``v_s`` by ``v_s + c_s v_(s-1)`` until the
   supports are nested;
3. :func:`triangular_permutation` relabels the last N coordinates so that
   every support is a prefix.

:func:`verify_support_ladder` then classifies the instance into the quick,
slow or q = 0 case. Coordinates are split as (x, y) with ``M`` leading x
coordinates; supports are bitmasks with bit ``h`` for coordinate ``h``
(counted from 0).

>>> from recipsum.lattice import SystemMatrix, build_unipotent_lattice
>>> nb, ladder = normalize(build_unipotent_lattice(SystemMatrix.parse('sqrt(2)')))
>>> nb.support_sets()
[[1], [1, 2]]
>>> ladder.case, ladder.s0
('zero_q', 1)
"""

import logging
from fractions import Fraction

import pandas as pd

from .constants import DEFAULT_MAX_NODES, ZERO_BITS
from .errors import InvariantViolation, PrecondViolation
from .lattice import squared_norm, successive_minima
from .numerics import compare, scalar

log = logging.getLogger(__name__)

_ZERO = Fraction(1, 2 ** ZERO_BITS)


def is_zero_coordinate(x):
    """
    Exact zero test, or the 2**-100 threshold on decimal coordinates.

    >>> from recipsum.numerics import BigDecimal
    >>> is_zero_coordinate(BigDecimal(2.0 ** -120))
    True
    """
    if x.exact:
        return x.is_zero()
    if x.is_zero():
        return True
    if compare(abs(x), _ZERO) < 0:
        log.warning("coordinate %s declared zero below 2**-%d", x, ZERO_BITS)
        return True
    return False


def support_mask(vector):
    """
    Bitmask of the nonzero coordinates of ``vector``.

    >>> bin(support_mask([1, 0, 1]))
    '0b101'
    """
    mask = 0
    for h, x in enumerate(vector):
        if not is_zero_coordinate(scalar(x)):
            mask |= 1 << h
    return mask


def mask_to_set(mask):
    """1-based coordinate indices of a bitmask."""
    out = []
    h = 0
    while mask >> h:
        if (mask >> h) & 1:
            out.append(h + 1)
        h += 1
    return out


def _is_prefix(mask):
    return mask & (mask + 1) == 0


class NormalizedBasis(object):
    """
    A lattice basis together with the bookkeeping of its normalization.

    ``coefficients[s]`` are the integer coordinates of ``vectors[s]`` in the
    input basis; for lattices built from a matrix L these are (p_s, q_s).
    ``permutation[t]`` is the original index of the y coordinate now at
    position t, and ``constants`` lists the nesting multipliers c_s.
    """

    def __init__(self, vectors, coefficients, M, report, permutation=None,
                 constants=None, stage='mahler_weyl', certificate=None):
        self.vectors = tuple(tuple(v) for v in vectors)
        self.coefficients = tuple(tuple(c) for c in coefficients)
        self.dim = len(self.vectors)
        self.M = M
        self.N = self.dim - M
        self.report = report
        self.permutation = tuple(permutation) if permutation is not None \
            else tuple(range(self.N))
        self.constants = tuple(constants) if constants is not None else (0,) * self.dim
        self.stage = stage
        self.certificate = tuple(certificate) if certificate is not None else None
        self.supports = tuple(support_mask(v) for v in self.vectors)

    def __repr__(self):
        return '<NormalizedBasis dim=%d M=%d %s>' % (self.dim, self.M, self.stage)

    def support_sets(self):
        return [mask_to_set(m) for m in self.supports]

    def q(self, s):
        """The q part of the coefficients of vector s (0-based)."""
        return self.coefficients[s][self.M:]

    def is_nested(self):
        return all(a & ~b == 0 for a, b in zip(self.supports, self.supports[1:]))

    def norms_squared(self):
        return [squared_norm(v) for v in self.vectors]

    def change_of_basis_det(self):
        """Determinant of the integer coefficient matrix, exact."""
        rows = [[Fraction(x) for x in c] for c in self.coefficients]
        n = len(rows)
        det = Fraction(1)
        for col in range(n):
            pivot = next((r for r in range(col, n) if rows[r][col]), None)
            if pivot is None:
                return Fraction(0)
            if pivot != col:
                rows[col], rows[pivot] = rows[pivot], rows[col]
                det = -det
            det *= rows[col][col]
            for r in range(col + 1, n):
                f = rows[r][col] / rows[col][col]
                if f:
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
        return det

    def to_record(self):
        return {
            'M': self.M,
            'N': self.N,
            'stage': self.stage,
            'vectors': [[str(x) for x in v] for v in self.vectors],
            'coefficients': [list(c) for c in self.coefficients],
            'supports': self.support_sets(),
            'permutation': list(self.permutation),
            'constants': list(self.constants),
        }


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def column_hermite(C):
    """
    Unimodular column operations making the integer matrix C lower triangular.

    Returns (T, U) with ``T = C U``.

    >>> column_hermite([[0, 1], [1, -1]])[0]
    [[1, 0], [-1, -1]]
    """
    n = len(C)
    A = [list(row) for row in C]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for s in range(n):
        for j in range(s + 1, n):
            b = A[s][j]
            if b == 0:
                continue
            a = A[s][s]
            g, x, y = _xgcd(a, b)
            for mat in (A, U):
                for row in mat:
                    cs, cj = row[s], row[j]
                    row[s] = x * cs + y * cj
                    row[j] = (-b // g) * cs + (a // g) * cj
        if A[s][s] == 0:
            raise PrecondViolation("witness coefficients are linearly dependent")
    return A, U


def _lower_inverse(T):
    n = len(T)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = Fraction(1, T[i][i])
        for j in range(i - 1, -1, -1):
            acc = sum(T[i][k] * inv[k][j] for k in range(j, i))
            inv[i][j] = -acc / T[i][i]
    return inv


def mahler_weyl_basis(basis, report=None, M=None, max_nodes=DEFAULT_MAX_NODES):
    """
    Complete the minima witnesses of ``basis`` to a basis of the lattice.

    Vector s is the witness itself when the witnesses already generate the
    lattice up to that step; otherwise it is the point of the lattice
    slice with coefficient 1/t_ss on the s-th witness and coefficients
    reduced into [-1/2, 1/2] on the earlier ones.

    >>> from recipsum.lattice import LatticeBasis
    >>> nb = mahler_weyl_basis(LatticeBasis([[1, 0], [Fraction(1, 2), Fraction(1, 2)]]), M=1)
    >>> [[str(x) for x in v] for v in nb.vectors]
    [['1/2', '1/2'], ['1/2', '-1/2']]
    """
    if report is None:
        report = successive_minima(basis, max_nodes)
    if M is None:
        M = basis.split if basis.split is not None else 0
    n = basis.dim
    C = [list(c) for c in report.coefficients]
    T, _ = column_hermite(C)
    inv = _lower_inverse(T)
    coeffs = []
    for s in range(n):
        if abs(T[s][s]) == 1:
            coeffs.append(tuple(C[s]))
            continue
        x = list(inv[s])
        for j in range(s):
            x[j] -= (x[j] + Fraction(1, 2)) // 1
        row = [sum(x[j] * C[j][h] for j in range(s + 1)) for h in range(n)]
        if any(v.denominator != 1 for v in row):
            raise InvariantViolation("completion left the lattice at step %d" % (s + 1))
        coeffs.append(tuple(int(v) for v in row))
    vectors = [basis.combine(c) for c in coeffs]
    for s, v in enumerate(vectors):
        factor = max(Fraction(1), Fraction(s + 1, 2))
        if compare(squared_norm(v), report.squared[s] * (factor * factor)) > 0:
            raise InvariantViolation("|v_%d| exceeds max(1, s/2) lambda_s" % (s + 1))
    log.debug("Mahler-Weyl basis with diagonal %s", [T[s][s] for s in range(n)])
    return NormalizedBasis(vectors, coeffs, M, report)


def nest_supports(nb):
    """
    Make supports nested by adding multiples of the previous vector.

    For each s the multiplier c_s is the smallest integer in 0..n+1 with
    supp(v_(s-1)) inside supp(v_s + c_s v_(s-1)).

    >>> from recipsum.lattice import LatticeBasis
    >>> b = LatticeBasis([[1, 0, 1], [-1, 1, -1], [0, 0, 3]])
    >>> nb = NormalizedBasis(b.vectors, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], 1, None)
    >>> nest_supports(nb).constants
    (0, 0, 1)
    """
    n = nb.dim
    vectors = [nb.vectors[0]]
    coeffs = [nb.coefficients[0]]
    constants = [0]
    for s in range(1, n):
        prev_mask = support_mask(vectors[-1])
        for c in range(n + 2):
            v = tuple(a + b * c for a, b in zip(nb.vectors[s], vectors[-1]))
            if prev_mask & ~support_mask(v) == 0:
                break
        else:
            raise InvariantViolation("no nesting multiplier up to %d for vector %d"
                                     % (n + 1, s + 1))
        vectors.append(v)
        coeffs.append(tuple(a + b * c for a, b in zip(nb.coefficients[s], coeffs[-1])))
        constants.append(c)
    certificate = None
    if nb.report is not None:
        certificate = []
        for s, v in enumerate(vectors):
            bound = Fraction(n + 2) * max(Fraction(1), Fraction(s + 1, 2))
            ok = compare(squared_norm(v), nb.report.squared[s] * (bound * bound)) <= 0
            if not ok:
                log.warning("norm certificate fails for vector %d", s + 1)
            certificate.append(ok)
    return NormalizedBasis(vectors, coeffs, nb.M, nb.report, nb.permutation,
                           constants, 'nested', certificate)


def has_zero_q(nb):
    """Index (1-based) of the first vector with q = 0, else None."""
    x_part = (1 << nb.M) - 1
    for s, mask in enumerate(nb.supports):
        if mask & ~x_part == 0:
            return s + 1
    return None


def triangular_permutation(nb):
    """
    Permute the last N coordinates so that nested supports become prefixes.

    >>> nb = NormalizedBasis([[1, 0, 1], [1, 1, 1], [2, 1, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]], 1, None)
    >>> p = triangular_permutation(nb)
    >>> p.permutation, p.support_sets()
    ((1, 0), [[1, 2], [1, 2, 3], [1, 2, 3]])
    """
    M, N = nb.M, nb.N
    x_part = (1 << M) - 1
    for s, mask in enumerate(nb.supports):
        if mask & x_part != x_part or mask == x_part:
            raise PrecondViolation("vector %d has support %s; use the q = 0 case"
                                   % (s + 1, mask_to_set(mask)))
    order = []
    for mask in nb.supports:
        for j in range(N):
            if (mask >> (M + j)) & 1 and j not in order:
                order.append(j)
    order.extend(j for j in range(N) if j not in order)

    def relabel(v):
        return tuple(v[:M]) + tuple(v[M + j] for j in order)

    vectors = [relabel(v) for v in nb.vectors]
    coeffs = [relabel(c) for c in nb.coefficients]
    perm = tuple(nb.permutation[j] for j in order)
    out = NormalizedBasis(vectors, coeffs, M, nb.report, perm, nb.constants,
                          'permuted', nb.certificate)
    for s, mask in enumerate(out.supports):
        if nb.is_nested() and not _is_prefix(mask):
            raise InvariantViolation("support of vector %d is not a prefix" % (s + 1))
    return out


class LadderReport(object):
    """
    Support ladder of a permuted basis and its case classification.

    ``case`` is ``'quick'``, ``'slow'`` or ``'zero_q'`` with ``s0`` the
    deciding index (1-based); ``h[s]`` is the number of y coordinates in the
    support of vector s+1.
    """

    def __init__(self, M, N, supports, passes, h, case, s0, exact_prefix):
        self.M = M
        self.N = N
        self.supports = tuple(supports)
        self.passes = tuple(passes)
        self.h = tuple(h)
        self.case = case
        self.s0 = s0
        self.exact_prefix = tuple(exact_prefix)

    def __repr__(self):
        return '<LadderReport %s s0=%s>' % (self.case, self.s0)

    @property
    def ok(self):
        return all(self.passes)

    def branch(self, s):
        """Which ratio bound applies to the product of the first s minima."""
        if self.case == 'zero_q':
            return 'zero_q'
        if s <= self.M:
            return 'naive'
        if any(s0 <= s for s0 in self.exact_prefix):
            return 'slow'
        return 'quick'

    def to_frame(self):
        return pd.DataFrame({
            's': range(1, len(self.supports) + 1),
            'support': [' '.join(str(h) for h in mask_to_set(m)) for m in self.supports],
            'ladder': self.passes,
            'h': self.h,
            'branch': [self.branch(s) for s in range(1, len(self.supports) + 1)],
        })


def verify_support_ladder(nb, M=None):
    """
    Check {1..max(M+1, s)} inside supp(v_s) for every s and classify.

    >>> nb = NormalizedBasis([[1, 1, 1], [1, 1, 1], [1, 1, 1]], [[1, 0, 0]] * 3, 1, None)
    >>> verify_support_ladder(nb).case
    'quick'
    >>> nb = NormalizedBasis([[1, 1, 0], [1, 1, 0], [1, 1, 1]], [[1, 0, 0]] * 3, 1, None)
    >>> ladder = verify_support_ladder(nb)
    >>> ladder.case, ladder.s0
    ('slow', 2)
    """
    M = nb.M if M is None else M
    n = nb.dim
    passes = []
    h = []
    exact_prefix = []
    for s, mask in enumerate(nb.supports, start=1):
        need = (1 << max(M + 1, s)) - 1
        passes.append(mask & need == need)
        h.append((mask >> M).bit_length())
        if s >= M + 1 and mask == (1 << s) - 1:
            exact_prefix.append(s)
    zero = has_zero_q(nb)
    if zero is not None:
        case, s0 = 'zero_q', zero
    else:
        inner = [s for s in exact_prefix if s < n]
        case, s0 = ('slow', inner[0]) if inner else ('quick', None)
    return LadderReport(M, n - M, nb.supports, passes, h, case, s0, exact_prefix)


def normalize(basis, report=None, M=None, max_nodes=DEFAULT_MAX_NODES):
    """
    Run the whole normalization and return (basis, ladder).

    Bases with a q = 0 vector skip the permutation, and so do bases whose
    x coordinates vanish somewhere (possible only for rational rows).
    """
    nb = mahler_weyl_basis(basis, report, M, max_nodes)
    nb = nest_supports(nb)
    if has_zero_q(nb) is None:
        try:
            nb = triangular_permutation(nb)
        except PrecondViolation as err:
            log.warning("supports left unpermuted: %s", err)
    ladder = verify_support_ladder(nb)
    log.debug("normalized basis: %r, %r", nb, ladder)
    return nb, ladder
