"""
Lattices, scaling maps and successive minima.

The lattice attached to an M x N matrix L is generated by the columns of the
unipotent block matrix [[I_M, L], [0, I_N]]. Its images under diagonal maps
are again :class:`LatticeBasis` objects that remember the scaling.

Successive minima are computed by enumeration: a floating point LLL
reduction only supplies the radius and the pruning geometry, every reported
norm is an exact (or high-precision) squared norm.

>>> L = SystemMatrix([['sqrt(2)']])
>>> basis = build_unipotent_lattice(L)
>>> [[str(x) for x in v] for v in basis.vectors]
[['1', '0'], ['sqrt(2)', '1']]
>>> basis.det
ExactQuadratic(1, 0, 1, 1)
>>> report = successive_minima(standard_lattice(2))
>>> [str(x) for x in report.lambdas]
['1', '1']
"""

import functools
import itertools
import logging
import math
from fractions import Fraction

import mpmath.libmp as mlib
import numpy as np
from mpmath.libmp import round_nearest
from scipy.special import gammaln

from .constants import (DEFAULT_BUDGET, DEFAULT_MAX_NODES, DEFAULT_PRECISION,
                        LLL_DELTA, MAX_DIM)
from .errors import (BudgetExceeded, DomainError, InvariantViolation,
                     PrecondViolation)
from .numerics import (BigDecimal, ExactQuadratic, RealScalar, certified_sign,
                       certify_irrational, common_field, compare, parse_scalar, power,
                       scalar, sqrt, to_decimal)

log = logging.getLogger(__name__)

# relative slack on float enumeration radii
_SLACK = 2.0 ** -30


class SystemMatrix(object):
    """
    The M x N real matrix L.

    Entries may be anything :func:`recipsum.numerics.scalar` accepts. String
    entries use the matrix entry grammar, with decimal literals read as
    high-precision decimals.

    >>> L = SystemMatrix.parse('sqrt(2),sqrt(3)')
    >>> L.M, L.N
    (1, 2)
    >>> print(L)
    sqrt(2),sqrt(3)
    >>> SystemMatrix([])
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: a system matrix needs at least one row and one column
    """

    def __init__(self, entries, prec=None, assume_irrational=False):
        rows = []
        for row in entries:
            rows.append(tuple(parse_scalar(e, decimals='big', prec=prec)
                              if isinstance(e, str) else scalar(e, prec)
                              for e in row))
        if not rows or not rows[0]:
            raise DomainError("a system matrix needs at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DomainError("rows of a system matrix must have equal length")
        self.rows = tuple(rows)
        self.M = len(rows)
        self.N = len(rows[0])
        self.prec = prec or DEFAULT_PRECISION
        self.verdicts = certify_irrational(rows)
        self.assume_irrational = assume_irrational
        for i, verdict in enumerate(self.verdicts):
            if verdict == 'flagged' or (verdict == 'assumed' and not assume_irrational):
                log.warning("row %d of L is not certified irrational (%s)", i + 1, verdict)
        for i, row in enumerate(rows):
            if common_field(row) is None:
                log.warning("row %d of L mixes fields; its values are evaluated as decimals",
                            i + 1)
        self._float = np.array([[e.approx() for e in row] for row in rows], dtype=float)

    @classmethod
    def parse(cls, text, prec=None, assume_irrational=False):
        """Rows separated by ';', entries by ','."""
        rows = [[e for e in row.split(',')] for row in text.split(';') if row.strip()]
        return cls(rows, prec=prec, assume_irrational=assume_irrational)

    def __str__(self):
        return ';'.join(','.join(str(e) for e in row) for row in self.rows)

    def __repr__(self):
        return "SystemMatrix.parse(%r)" % str(self)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def exact(self):
        return all(isinstance(e, ExactQuadratic) for row in self.rows for e in row)

    def as_float(self):
        return self._float.copy()


class BoxSpec(object):
    """
    The aligned box prod_j [-Q_j, Q_j] with every Q_j >= 1.

    ``volume`` is Q_geo**N = Q_1...Q_N, kept exact; ``Q_geo`` itself
    involves an N-th root.

    >>> box = BoxSpec([4, 1])
    >>> box.volume, box.int_bounds, float(box.Q_geo)
    (ExactQuadratic(4, 0, 1, 1), (4, 1), 2.0)
    >>> BoxSpec([0.5])
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: box half-widths must be at least 1, got 0.5
    """

    def __init__(self, Q, prec=None):
        if isinstance(Q, (int, float, str, Fraction, RealScalar)):
            Q = [Q]
        values = tuple(parse_scalar(q) if isinstance(q, str) else scalar(q) for q in Q)
        if not values:
            raise DomainError("a box needs at least one side")
        for q in values:
            if q < 1:
                raise DomainError("box half-widths must be at least 1, got %s" % q)
        self.Q = values
        self.N = len(values)
        self.prec = prec or DEFAULT_PRECISION
        vol = scalar(1)
        for q in values:
            vol = vol * q
        self.volume = vol
        self.Q_max = max(values)
        self.int_bounds = tuple(q.floor() for q in values)

    @property
    def Q_geo(self):
        if self.N == 1:
            return self.Q[0]
        return power(self.volume, Fraction(1, self.N), self.prec)

    def __repr__(self):
        return 'BoxSpec([%s])' % ', '.join("'%s'" % q for q in self.Q)

    def __str__(self):
        return ','.join(str(q) for q in self.Q)

    def points(self, include_zero=False):
        """Integer points of the box in lexicographic order."""
        ranges = [range(-b, b + 1) for b in self.int_bounds]
        for q in itertools.product(*ranges):
            if include_zero or any(q):
                yield q

    def size(self):
        return functools.reduce(lambda acc, b: acc * (2 * b + 1), self.int_bounds, 1)


def determinant(vectors, prec=None):
    """
    Determinant by Gaussian elimination in RealScalar arithmetic.

    Exact when all entries lie in one quadratic field.

    >>> determinant([[2, 1], [1, 3]])
    ExactQuadratic(5, 0, 1, 1)
    """
    prec = max(prec or 0, 319)
    rows = []
    for v in vectors:
        row = [scalar(x) for x in v]
        rows.append([x if x.exact else x.to_decimal(max(prec, x.prec)) for x in row])
    n = len(rows)
    det = scalar(1)
    for col in range(n):
        candidates = [r for r in range(col, n) if not rows[r][col].is_zero()]
        if not candidates:
            return scalar(0)
        pivot = max(candidates, key=lambda r: abs(rows[r][col].approx()))
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        p = rows[col][col]
        det = det * p
        for r in range(col + 1, n):
            if rows[r][col].is_zero():
                continue
            f = rows[r][col] / p
            rows[r] = [rows[r][k] - f * rows[col][k] if k > col else scalar(0)
                       for k in range(n)]
    return det


class LatticeBasis(object):
    """
    An ordered basis of a full-rank lattice in R^n.

    ``vectors[i][h]`` is coordinate h of basis vector i. ``provenance`` is
    one of ``'raw'``, ``'unipotent'`` and ``'scaled'``; scaled images keep
    their diagonal and inherit the determinant of their parent.

    >>> LatticeBasis([[1, 2], [2, 4]])
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: basis vectors are linearly dependent
    """

    def __init__(self, vectors, provenance='raw', diagonal=None, det=None, split=None):
        vecs = tuple(tuple(scalar(x) for x in v) for v in vectors)
        n = len(vecs)
        if n == 0 or any(len(v) != n for v in vecs):
            raise DomainError("a basis of R^n needs n vectors of length n")
        self.vectors = vecs
        self.dim = n
        self.provenance = provenance
        self.diagonal = tuple(diagonal) if diagonal is not None else None
        # number of leading "x" coordinates for lattices built from L
        self.split = split
        if det is None:
            det = determinant(vecs)
        else:
            det = scalar(det)
        if det.is_zero():
            raise DomainError("basis vectors are linearly dependent")
        self.det = det
        self._float = np.array([[x.approx() for x in v] for v in vecs], dtype=float)

    def __repr__(self):
        return '<LatticeBasis dim=%d %s>' % (self.dim, self.provenance)

    def as_float(self):
        return self._float.copy()

    def combine(self, coeffs):
        """The lattice vector sum_i coeffs[i] * vectors[i]."""
        out = []
        for h in range(self.dim):
            acc = scalar(0)
            for c, v in zip(coeffs, self.vectors):
                if c:
                    acc = acc + v[h] * c
            out.append(acc)
        return tuple(out)

    def is_upper_triangular(self):
        return all(self.vectors[i][h].is_zero()
                   for i in range(self.dim) for h in range(i + 1, self.dim))

    def change_basis(self, unimodular):
        """The same lattice in the basis given by integer rows ``unimodular``."""
        vecs = [self.combine(row) for row in unimodular]
        return LatticeBasis(vecs, provenance=self.provenance, diagonal=self.diagonal,
                            split=self.split)

    def to_record(self):
        return {
            'dim': self.dim,
            'provenance': self.provenance,
            'diagonal': [str(x) for x in self.diagonal] if self.diagonal else None,
            'det': str(self.det),
            'vectors': [[str(x) for x in v] for v in self.vectors],
        }


def standard_lattice(n, scales=None):
    """
    Z^n, or diag(scales) Z^n, as a raw basis.

    >>> successive_minima(standard_lattice(2, [Fraction(1, 2), 3])).lambdas
    (ExactQuadratic(1, 0, 2, 1), ExactQuadratic(3, 0, 1, 1))
    """
    scales = [1] * n if scales is None else list(scales)
    vectors = [[scales[i] if h == i else 0 for h in range(n)] for i in range(n)]
    det = scalar(1)
    for f in scales:
        det = det * f
    return LatticeBasis(vectors, det=det)


def build_unipotent_lattice(L):
    """
    Basis of the lattice generated by the columns of [[I_M, L], [0, I_N]].

    >>> b = build_unipotent_lattice(SystemMatrix.parse('sqrt(2),sqrt(3)'))
    >>> [[str(x) for x in v] for v in b.vectors]
    [['1', '0', '0'], ['sqrt(2)', '1', '0'], ['sqrt(3)', '0', '1']]
    """
    M, N = L.M, L.N
    n = M + N
    vectors = []
    for i in range(M):
        vectors.append([int(h == i) for h in range(n)])
    for j in range(N):
        vectors.append([L.rows[h][j] if h < M else int(h == M + j) for h in range(n)])
    return LatticeBasis(vectors, provenance='unipotent', det=1, split=M)


def theta(eps, Q_geo, M, N, prec=None):
    """
    The scale (eps*Q**N)**(1/(M+N)) / eps**(1/M).

    >>> float(theta(Fraction(1, 4), 4, 1, 1))
    4.0
    >>> round(float(theta(Fraction(1, 10), 8, 1, 2)), 4)
    18.5664
    >>> theta(0, 4, 1, 1)
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: eps must be positive, got 0
    """
    eps = scalar(eps)
    if eps.sign() <= 0:
        raise DomainError("eps must be positive, got %s" % eps)
    Q_geo = scalar(Q_geo)
    if Q_geo < 1:
        raise DomainError("Q_geo must be at least 1, got %s" % Q_geo)
    return theta_from_volume(eps, Q_geo ** N, M, N, prec)


def theta_from_volume(eps, volume, M, N, prec=None):
    """theta with Q**N given directly as the box volume."""
    prec = prec or DEFAULT_PRECISION
    top = power(scalar(eps) * volume, Fraction(1, M + N), prec)
    return top / power(eps, Fraction(1, M), prec)


def scale_lattice(basis, mu, nu=()):
    """
    Image of ``basis`` under diag(mu_1..mu_M, nu_1..nu_N).

    >>> b = build_unipotent_lattice(SystemMatrix([['sqrt(2)']]))
    >>> s = scale_lattice(b, [2], [Fraction(1, 2)])
    >>> [[str(x) for x in v] for v in s.vectors], s.det
    ([['2', '0'], ['2*sqrt(2)', '1/2']], ExactQuadratic(1, 0, 1, 1))
    """
    diag = [scalar(x) for x in list(mu) + list(nu)]
    if len(diag) != basis.dim:
        raise DomainError("need %d scale factors, got %d" % (basis.dim, len(diag)))
    for f in diag:
        if f.sign() <= 0:
            raise DomainError("scale factors must be positive, got %s" % f)
    vectors = [[v[h] * diag[h] for h in range(basis.dim)] for v in basis.vectors]
    det = basis.det
    for f in diag:
        det = det * f
    return LatticeBasis(vectors, provenance='scaled', diagonal=diag, det=det,
                        split=basis.split)


def _gram_schmidt(b):
    n = len(b)
    bstar = np.zeros_like(b)
    mu = np.zeros((n, n))
    norms = np.zeros(n)
    for i in range(n):
        v = b[i].copy()
        for j in range(i):
            mu[i, j] = np.dot(b[i], bstar[j]) / norms[j]
            v -= mu[i, j] * bstar[j]
        bstar[i] = v
        norms[i] = np.dot(v, v)
    return bstar, mu, norms


def lll_reduce(vectors, delta=LLL_DELTA, max_iter=100000):
    """
    Float LLL reduction of the rows of ``vectors``.

    Returns the reduced vectors and the integer matrix U with
    ``reduced = U @ vectors``. Only used to bound enumeration radii.

    >>> red, U = lll_reduce([[1.0, 0.0], [5.0, 1.0]])
    >>> red.tolist(), U.tolist()
    ([[1.0, 0.0], [0.0, 1.0]], [[1, 0], [-5, 1]])
    """
    base = np.asarray(vectors, dtype=float)
    if base.ndim != 2 or base.shape[0] != base.shape[1]:
        raise ValueError('"vectors" must be a square 2d array-like object.')
    n = base.shape[0]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def current():
        return np.array([np.dot(np.array(row, dtype=float), base) for row in U])

    b = current()
    k = 1
    steps = 0
    while k < n:
        steps += 1
        if steps > max_iter:
            raise RuntimeError('LLL algorithm did not terminate.')
        for j in reversed(range(k)):
            _, mu, _ = _gram_schmidt(b)
            r = int(round(mu[k, j]))
            if r:
                U[k] = [a - r * c for a, c in zip(U[k], U[j])]
                b[k] = np.dot(np.array(U[k], dtype=float), base)
        _, mu, norms = _gram_schmidt(b)
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            b[[k, k - 1]] = b[[k - 1, k]]
            k = max(k - 1, 1)
    return b, np.array(U, dtype=object)


def _enumerate(mu, norms, r2, max_nodes, counter):
    """Coefficient vectors x != 0 with |sum x_i b*_i-expansion|^2 <= r2."""
    n = len(norms)
    bound = r2 * (1.0 + _SLACK) + 1e-300
    x = [0] * n
    found = []

    def visit(i, partial):
        centre = -sum(mu[j, i] * x[j] for j in range(i + 1, n))
        width = math.sqrt(max(bound - partial, 0.0) / norms[i])
        lo = math.ceil(centre - width - _SLACK)
        hi = math.floor(centre + width + _SLACK)
        for xi in range(lo, hi + 1):
            counter[0] += 1
            if counter[0] > max_nodes:
                raise BudgetExceeded('lattice enumeration', max_nodes, counter[0])
            x[i] = xi
            t = partial + (xi - centre) ** 2 * norms[i]
            if t > bound:
                continue
            if i == 0:
                if any(x):
                    found.append(tuple(x))
            else:
                visit(i - 1, t)
        x[i] = 0

    visit(n - 1, 0.0)
    return found


def _first_nonzero_positive(c):
    for v in c:
        if v:
            return v > 0
    return False


def squared_norm(vector):
    acc = scalar(0)
    for x in vector:
        acc = acc + x * x
    return acc


class _Rank(object):
    """Incremental rank of integer vectors, exact over the rationals."""

    def __init__(self, n):
        self.n = n
        self.rows = []

    def add(self, c):
        v = [Fraction(x) for x in c]
        for pivot, row in self.rows:
            if v[pivot]:
                f = v[pivot] / row[pivot]
                v = [a - f * b for a, b in zip(v, row)]
        for k, a in enumerate(v):
            if a:
                self.rows.append((k, v))
                return True
        return False


class MinimaReport(object):
    """
    Successive minima of a lattice with witnesses.

    ``lambdas`` are the minima, ``squared`` their exact squares,
    ``witnesses`` the lattice vectors attaining them and ``coefficients``
    the integer coordinates of the witnesses in the input basis.
    """

    def __init__(self, lambdas, squared, witnesses, coefficients, radius, nodes):
        self.lambdas = tuple(lambdas)
        self.squared = tuple(squared)
        self.witnesses = tuple(witnesses)
        self.coefficients = tuple(coefficients)
        self.radius = radius
        self.nodes = nodes
        self.dim = len(self.lambdas)

    def __repr__(self):
        return '<MinimaReport %s>' % ', '.join('%.6g' % x.approx() for x in self.lambdas)

    def product(self, s=None):
        """lambda_1 * ... * lambda_s."""
        s = self.dim if s is None else s
        acc = scalar(1)
        for x in self.lambdas[:s]:
            acc = acc * x
        return acc

    def to_record(self):
        return {
            'lambdas': [str(x) for x in self.lambdas],
            'witnesses': [[str(x) for x in w] for w in self.witnesses],
            'coefficients': [list(c) for c in self.coefficients],
            'nodes': self.nodes,
            'radius': self.radius,
        }


def successive_minima(basis, max_nodes=DEFAULT_MAX_NODES):
    """
    Successive minima of the lattice spanned by ``basis``.

    Lattice vectors are enumerated in a ball whose squared radius starts at
    the first LLL vector and doubles until the enumerated vectors span R^n;
    the LLL basis itself caps the radius. Among vectors of equal norm the
    lexicographically smallest integer coefficient vector (first nonzero
    coordinate positive) wins.

    >>> b = LatticeBasis([[1, 0], [Fraction(1, 2), Fraction(1, 2)]])
    >>> r = successive_minima(b)
    >>> [str(x) for x in r.lambdas]
    ['sqrt(2)/2', 'sqrt(2)/2']
    >>> [[str(x) for x in w] for w in r.witnesses]
    [['1/2', '1/2'], ['1/2', '-1/2']]
    """
    n = basis.dim
    if n > MAX_DIM:
        raise PrecondViolation("successive minima are limited to dimension %d" % MAX_DIM)
    reduced, U = lll_reduce(basis.as_float())
    _, mu, norms = _gram_schmidt(reduced)
    cap = float(max(np.dot(v, v) for v in reduced))
    r2 = float(min(np.dot(v, v) for v in reduced))
    counter = [0]
    while True:
        raw = _enumerate(mu, norms, r2, max_nodes, counter)
        # every vector below this exact limit is inside the float search ball
        limit = Fraction(r2 * (1.0 + _SLACK / 2))
        seen = set()
        candidates = []
        for x in raw:
            c = tuple(int(sum(x[i] * U[i][j] for i in range(n))) for j in range(n))
            if c in seen or not _first_nonzero_positive(c):
                continue
            seen.add(c)
            v = basis.combine(c)
            sq = squared_norm(v)
            if compare(sq, limit) <= 0:
                candidates.append((sq, c, v))
        candidates.sort(key=functools.cmp_to_key(_order))
        rank = _Rank(n)
        chosen = [item for item in candidates if rank.add(item[1])]
        if len(chosen) == n:
            break
        if r2 >= cap:
            # the LLL vectors themselves lie inside this radius
            raise InvariantViolation("enumeration missed independent vectors")
        r2 = min(2.0 * r2, cap)
        log.debug("minima radius grown to %.6g after %d nodes", math.sqrt(r2), counter[0])
    squared = [item[0] for item in chosen]
    lambdas = [sqrt(sq, _prec_of(sq)) for sq in squared]
    return MinimaReport(lambdas, squared, [item[2] for item in chosen],
                        [item[1] for item in chosen], math.sqrt(r2), counter[0])


def _prec_of(x):
    return x.prec or DEFAULT_PRECISION


def _order(a, b):
    c = compare(a[0], b[0])
    if c:
        return c
    return (a[1] > b[1]) - (a[1] < b[1])


def ball_volume(n, prec=None):
    """
    Volume of the Euclidean unit ball in R^n as a BigDecimal.

    >>> float(ball_volume(1)), round(float(ball_volume(2)), 12)
    (2.0, 3.14159265359)
    """
    prec = prec or DEFAULT_PRECISION
    work = prec + 32
    pi = mlib.mpf_pi(work, round_nearest)
    m = n // 2
    if n % 2 == 0:
        num = mlib.mpf_pow_int(pi, m, work, round_nearest)
        den = mlib.from_int(math.factorial(m))
    else:
        # 2 (2 pi)^m / n!!
        two_pi = mlib.mpf_mul(mlib.from_int(2), pi)
        num = mlib.mpf_mul(mlib.from_int(2), mlib.mpf_pow_int(two_pi, m, work, round_nearest))
        den = mlib.from_int(_double_factorial(n))
    vol = BigDecimal(mlib.mpf_div(num, den, prec, round_nearest), prec, inexact=n > 1)
    # cross-check the closed form against the gamma function
    if abs(math.log(vol.approx()) - (0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1))) > 1e-9:
        raise InvariantViolation("ball volume mismatch in dimension %d" % n)
    return vol


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def minkowski_check(report, det, prec=None):
    """
    The ratio (lambda_1...lambda_n) vol(B^n) / (2^n |det|), checked to lie
    in [1/n!, 1].

    >>> r = minkowski_check(successive_minima(standard_lattice(2)), 1)
    >>> round(float(r), 6)
    0.785398
    """
    prec = prec or DEFAULT_PRECISION
    n = report.dim
    det = abs(scalar(det))
    ratio = to_decimal(report.product(), prec) * ball_volume(n, prec) / (det * 2 ** n)
    tol = Fraction(1, 2 ** (prec - 40))
    lower = Fraction(1, math.factorial(n)) * (1 - tol)
    upper = 1 + tol
    if compare(ratio, lower) < 0 or compare(ratio, upper) > 0:
        raise InvariantViolation("Minkowski ratio %s outside [1/%d!, 1]" % (ratio, n))
    return ratio


def lattice_points_in_box(basis, P, budget=None, include_zero=True):
    """
    Integer coefficient vectors of all lattice points in prod_h [-P_h, P_h].

    Upper triangular bases are enumerated coordinate by coordinate from the
    last one; other bases through a ball of radius |P|_2 and an exact box
    filter.

    >>> pts = lattice_points_in_box(standard_lattice(2), [3, 2])
    >>> len(pts)
    35
    """
    budget = budget or DEFAULT_BUDGET
    n = basis.dim
    P = [scalar(p) for p in P]
    if len(P) != n:
        raise DomainError("need %d half-widths, got %d" % (n, len(P)))
    Pf = [p.approx() for p in P]
    V = basis.as_float()
    counter = [0]
    if basis.is_upper_triangular():
        points = _box_triangular(basis, P, Pf, V, budget, counter)
    else:
        points = _box_by_ball(basis, P, Pf, V, budget, counter)
    if not include_zero:
        points = [c for c in points if any(c)]
    return points


def _inside(basis, P, Pf, V, c, h):
    """Whether coordinate h of the lattice vector with coefficients c is in range."""
    terms = [c[i] * V[i][h] for i in range(len(c)) if c[i]]
    value = sum(terms)
    scale = sum(abs(t) for t in terms) + Pf[h]

    def exact():
        acc = scalar(0)
        for i in range(len(c)):
            if c[i]:
                acc = acc + basis.vectors[i][h] * c[i]
        return P[h] - abs(acc)
    return certified_sign(Pf[h] - abs(value), scale, exact) >= 0


def _box_triangular(basis, P, Pf, V, budget, counter):
    n = basis.dim
    c = [0] * n
    out = []

    def visit(h):
        rest = sum(c[i] * V[i][h] for i in range(h + 1, n))
        diag = V[h][h]
        ends = sorted(((-Pf[h] - rest) / diag, (Pf[h] - rest) / diag))
        pad = 1 + _SLACK * (abs(ends[0]) + abs(ends[1]))
        for ch in range(math.ceil(ends[0] - pad), math.floor(ends[1] + pad) + 1):
            counter[0] += 1
            if counter[0] > budget:
                raise BudgetExceeded('box enumeration', budget, counter[0])
            c[h] = ch
            if not _inside(basis, P, Pf, V, c, h):
                continue
            if h == 0:
                out.append(tuple(c))
            else:
                visit(h - 1)
        c[h] = 0

    visit(n - 1)
    out.sort()
    return out


def _box_by_ball(basis, P, Pf, V, budget, counter):
    n = basis.dim
    reduced, U = lll_reduce(V)
    _, mu, norms = _gram_schmidt(reduced)
    r2 = sum(p * p for p in Pf)
    raw = _enumerate(mu, norms, r2, budget, counter)
    out = [tuple([0] * n)]
    for x in raw:
        c = tuple(int(sum(x[i] * U[i][j] for i in range(n))) for j in range(n))
        if all(_inside(basis, P, Pf, V, c, h) for h in range(n)):
            out.append(c)
    out.sort()
    return out
