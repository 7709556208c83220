"""
Sums of reciprocals of fractional parts.

:func:`sum_reciprocals` evaluates

    S_L(Q) = sum over 0 != q in prod [-Q_j, Q_j] of prod_i 1/||L_i q||,

:func:`dyadic_upper` bounds it by counting the solutions of
prod_i ||L_i q|| < 2^-k, and :func:`envelope` gives the lower and upper
growth shapes Q^N (log Q)^M and
Q^N log(Q/phi)^M + (Q^N/phi) log(Q/phi)^(M-1).

The approximation constant phi comes from :func:`phi_profile`, the minimum
of prod_j max(1, |q_j|) prod_i ||L_i q|| over the weighted box
prod_j max(1, |q_j|) <= X^N.

>>> from recipsum.lattice import SystemMatrix
>>> L = SystemMatrix.parse('sqrt(2)')
>>> sum_reciprocals(L, [1]).value
ExactQuadratic(2, 2, 1, 2)
>>> round(float(phi_profile(L, [2]).values[0]), 6)
0.343146
"""

import logging
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy.stats import gmean

from .constants import DEFAULT_BUDGET, EXACT_TERMS
from .counting import CountInstance, count_bound
from .errors import BudgetExceeded, DivisionByZero, InvariantViolation, PrecondViolation
from .lattice import BoxSpec, SystemMatrix
from .numerics import BigDecimal, certified_sign, compare, log as _log, row_value, scalar

log = logging.getLogger(__name__)


def _box(Q):
    return Q if isinstance(Q, BoxSpec) else BoxSpec(Q)


def _matrix(L):
    return SystemMatrix.parse(L) if isinstance(L, str) else L


def _half_box(box):
    """Points of the box whose first nonzero coordinate is positive."""
    for q in box.points():
        if next(v for v in q if v) > 0:
            yield q


def distances(L, q):
    """||L_i q|| for every row, exact where the row allows it."""
    return [row_value(row, q, prec=L.prec).dist() for row in L.rows]


class DistanceTable(object):
    """
    Distances ||L_i q|| over one half of a punctured box.

    ``q`` and ``-q`` give the same distances, so only points whose first
    nonzero coordinate is positive are stored.
    """

    def __init__(self, L, Q, budget=DEFAULT_BUDGET):
        self.L = L = _matrix(L)
        self.box = box = _box(Q)
        if box.N != L.N:
            raise PrecondViolation("box has %d sides but L has %d columns" % (box.N, L.N))
        half = (box.size() - 1) // 2
        if half * L.M > budget:
            raise BudgetExceeded('distance table', budget, half * L.M)
        self.points = []
        self.dists = []
        for q in _half_box(box):
            d = distances(L, q)
            for i, x in enumerate(d):
                if x.is_zero():
                    raise DivisionByZero(i, q)
            self.points.append(q)
            self.dists.append(d)
        self.fprod = np.array([np.prod([x.approx() for x in d]) for d in self.dists])
        # two nearest integers when ||L_i q|| = 1/2
        self.mult = np.array([2 ** sum(1 for x in d if compare(x, Fraction(1, 2)) == 0)
                              for d in self.dists], dtype=np.int64)
        log.debug("distance table: %d points for Q = %s", len(self.points), box)

    def __len__(self):
        return len(self.points)

    def exact_product(self, idx):
        acc = scalar(1)
        for x in self.dists[idx]:
            acc = acc * x
        return acc

    def below(self, idx, bound):
        """Whether prod_i ||L_i q|| < bound for the stored point idx."""
        bound = scalar(bound)
        fb = bound.approx()
        return certified_sign(fb - self.fprod[idx], fb + self.fprod[idx],
                              lambda: bound - self.exact_product(idx)) > 0


class SumReport(object):
    """
    Value of S_L(Q) with the dyadic bound and the growth envelope next to it.

    ``phi_source`` is ``'empirical'`` when phi is the profile minimum at
    Q_geo and ``'assumed'`` when it was handed in.
    """

    def __init__(self, Q, value, terms, dyadic=None, lower=None, upper=None,
                 phi=None, phi_source=None):
        self.Q = Q
        self.value = value
        self.terms = terms
        self.dyadic = dyadic
        self.lower = lower
        self.upper = upper
        self.phi = phi
        self.phi_source = phi_source

    def __repr__(self):
        return '<SumReport Q=%s S=%.6g>' % (self.Q, float(self.value))

    @property
    def c_low(self):
        return float(self.value) / float(self.lower) if self.lower is not None else None

    @property
    def c_up(self):
        return float(self.value) / float(self.upper) if self.upper is not None else None

    def to_record(self):
        rec = {
            'Q': [str(q) for q in self.Q.Q],
            'Qgeo': float(self.Q.Q_geo),
            'S': str(self.value),
            'terms': self.terms,
        }
        for name in ('dyadic', 'lower', 'upper', 'phi'):
            value = getattr(self, name)
            rec[name] = None if value is None else float(value)
        rec.update({'phi_source': self.phi_source, 'c_low': self.c_low, 'c_up': self.c_up})
        return rec

    def row(self):
        """Flat table row; needs the dyadic bound and envelope filled in."""
        row = {'Q%d' % (j + 1): float(q) for j, q in enumerate(self.Q.Q)}
        row.update({
            'Qgeo': float(self.Q.Q_geo),
            'S': float(self.value),
            'lower': float(self.lower),
            'upper': float(self.upper),
            'dyadic': float(self.dyadic),
            'phi': float(self.phi),
            'phi_source': self.phi_source,
            'c_low': self.c_low,
            'c_up': self.c_up,
        })
        return row


def sum_reciprocals(L, Q, budget=DEFAULT_BUDGET, table=None, exact=None):
    """
    S_L(Q), the sum of prod_i 1/||L_i q|| over the punctured box.

    Terms are added in lexicographic order of q. Boxes with at most
    ``EXACT_TERMS`` points are summed exactly when every row lies in one
    quadratic field; ``exact`` overrides the choice.

    >>> sum_reciprocals('1/2', [3])
    Traceback (most recent call last):
        ...
    recipsum.errors.DivisionByZero: ||L_1 q|| = 0 for q = (2,)
    """
    if table is None:
        table = DistanceTable(L, Q, budget)
    box = table.box
    if exact is None:
        exact = box.size() <= EXACT_TERMS
    acc = scalar(0) if exact else BigDecimal(0, table.L.prec)
    for d in table.dists:
        term = scalar(1)
        for x in d:
            term = term / x
        acc = acc + term
    return SumReport(box, 2 * acc, 2 * len(table))


def truncation_index(Q, phi):
    """
    floor(log2(Q^N / phi)), the last dyadic level that can be nonempty.

    >>> truncation_index(BoxSpec([8]), Fraction(381966, 10 ** 6))
    4
    """
    ratio = _box(Q).volume / scalar(phi)
    if compare(ratio, 1) < 0:
        return -1
    k = 0
    while compare(ratio, 2 ** (k + 1)) >= 0:
        k += 1
    return k


def _check_box(box):
    if compare(box.Q_geo, 2) < 0:
        raise PrecondViolation("Q = %s must be at least 2" % box.Q_geo)


def dyadic_counts(table, K):
    """#M(L, 2^-k, 1/2, Q) for k = 0..K, read off a distance table."""
    counts = []
    for k in range(K + 1):
        bound = Fraction(1, 2 ** k)
        total = 0
        for idx in range(len(table)):
            if table.below(idx, bound):
                total += int(table.mult[idx])
        counts.append(2 * total)
    return counts


def dyadic_upper(L, Q, phi, budget=DEFAULT_BUDGET, table=None):
    """
    sum_(k=0..K) 2^(k+1) #M(L, 2^-k, 1/2, Q) with K = floor(log2(Q^N/phi)).

    Raises :class:`PrecondViolation` when some q lies below level K, which
    means phi exceeds the true minimum on the box.
    """
    if table is None:
        table = DistanceTable(L, Q, budget)
    box = table.box
    _check_box(box)
    K = truncation_index(box, phi)
    beyond = Fraction(1, 2 ** (K + 1))
    for idx in range(len(table)):
        if table.below(idx, beyond):
            raise PrecondViolation("q = %s lies below 2^-%d; phi = %s is too large"
                                   % (table.points[idx], K + 1, scalar(phi)))
    counts = dyadic_counts(table, K)
    return sum(2 ** (k + 1) * c for k, c in enumerate(counts))


def dyadic_terms(L, Q, phi, budget=DEFAULT_BUDGET, table=None):
    """
    One row per dyadic level: the count, its weight 2^(k+1) count, and for
    levels with 2^(k - M) >= e^M the counting estimate at eps = 2^-k, T = 1/2.
    """
    if table is None:
        table = DistanceTable(L, Q, budget)
    box = table.box
    L = table.L
    K = truncation_index(box, phi)
    head = int(np.ceil(L.M * (1 + 1 / np.log(2))))
    rows = []
    for k, count in enumerate(dyadic_counts(table, K)):
        if k >= head:
            inst = CountInstance(L, Fraction(1, 2 ** k), Fraction(1, 2), box)
            estimate = 2 ** (k + 1) * float(count_bound(inst, phi))
        else:
            estimate = np.nan
        rows.append({'k': k, 'count': count, 'weighted': 2 ** (k + 1) * count,
                     'part': 'tail' if k >= head else 'head', 'estimate': estimate})
    return pd.DataFrame(rows)


def envelope(L, Q, phi):
    """
    Lower and upper growth shapes, without constants.

    >>> lo, up = envelope(SystemMatrix.parse('sqrt(2)'), [4], Fraction(2, 5))
    >>> round(float(lo), 3), round(float(up), 2)
    (5.545, 19.21)
    """
    L = _matrix(L)
    box = _box(Q)
    _check_box(box)
    M = L.M
    Qg = box.Q_geo
    vol = box.volume
    lower = vol * _log(Qg) ** M
    spread = _log(Qg / scalar(phi))
    upper = vol * spread ** M + vol / scalar(phi) * spread ** (M - 1)
    return lower, upper


class PhiProfile(object):
    """
    Running minimum of prod_j max(1, |q_j|) prod_i ||L_i q|| over growing
    weighted boxes.
    """

    def __init__(self, grid, values, argmins, weights):
        self.grid = tuple(grid)
        self.values = tuple(values)
        self.argmins = tuple(argmins)
        self.weights = tuple(weights)

    def __repr__(self):
        return '<PhiProfile %d heights>' % len(self.grid)

    def at(self, X):
        """Value at a height on the grid."""
        for x, v in zip(self.grid, self.values):
            if compare(x, X) == 0:
                return v
        raise KeyError(X)

    @property
    def nonincreasing(self):
        return all(compare(b, a) <= 0 for a, b in zip(self.values, self.values[1:]))

    def to_frame(self):
        return pd.DataFrame({
            'X': [float(x) for x in self.grid],
            'phi': [float(v) for v in self.values],
            'argmin': [' '.join(str(v) for v in q) for q in self.argmins],
            'weight': self.weights,
        })


def _weighted_box(N, bound, budget):
    """
    Nonzero q with prod max(1, |q_j|) <= bound and first nonzero coordinate
    positive, ordered by weight then lexicographically.
    """
    out = []
    steps = [0]

    def visit(j, prefix, room):
        if j == N:
            if any(prefix) and next(v for v in prefix if v) > 0:
                out.append(tuple(prefix))
            return
        for a in range(room + 1):
            steps[0] += 1
            if steps[0] > budget:
                raise BudgetExceeded('phi profile', budget, steps[0])
            for v in ((a, -a) if a else (0,)):
                visit(j + 1, prefix + [v], room // max(a, 1))

    visit(0, [], bound)
    out.sort(key=lambda q: (_weight(q), q))
    return out


def _weight(q):
    w = 1
    for v in q:
        w *= max(1, abs(v))
    return w


def phi_profile(L, X_grid, budget=DEFAULT_BUDGET):
    """
    Exact minima of prod_j max(1, |q_j|) prod_i ||L_i q|| for
    prod_j max(1, |q_j|) <= X^N, X running over an ascending grid.

    >>> p = phi_profile(SystemMatrix.parse('golden'), [1, 10, 100])
    >>> [round(float(v), 6) for v in p.values], p.argmins[-1]
    ([0.381966, 0.381966, 0.381966], (1,))
    """
    L = _matrix(L)
    grid = [scalar(x) for x in X_grid]
    if not grid:
        raise PrecondViolation("empty height grid")
    if any(compare(b, a) <= 0 for a, b in zip(grid, grid[1:])):
        raise PrecondViolation("height grid must be ascending")
    N = L.N
    caps = [(x ** N).floor() for x in grid]
    points = _weighted_box(N, caps[-1], budget)
    values, argmins, weights = [], [], []
    best = best_q = None
    pos = 0
    for cap in caps:
        while pos < len(points) and _weight(points[pos]) <= cap:
            q = points[pos]
            pos += 1
            d = distances(L, q)
            for i, x in enumerate(d):
                if x.is_zero():
                    raise DivisionByZero(i, q)
            value = scalar(_weight(q))
            for x in d:
                value = value * x
            if best is None or compare(value, best) < 0:
                best, best_q = value, q
        if best is None:
            raise PrecondViolation("no nonzero q of weight at most %d" % cap)
        values.append(best)
        argmins.append(best_q)
        weights.append(_weight(best_q))
    return PhiProfile(grid, values, argmins, weights)


def empirical_phi(L, Q, budget=DEFAULT_BUDGET):
    """The profile minimum at X = Q_geo."""
    return phi_profile(L, [_box(Q).Q_geo], budget).values[0]


def sum_report(L, Q, phi=None, budget=DEFAULT_BUDGET):
    """
    S_L(Q) with its dyadic bound and envelope; phi defaults to the empirical
    minimum at Q_geo.

    The dyadic bound must dominate the sum.
    """
    L = _matrix(L)
    box = _box(Q)
    source = 'assumed'
    if phi is None:
        phi = empirical_phi(L, box, budget)
        source = 'empirical'
    table = DistanceTable(L, box, budget)
    report = sum_reciprocals(L, box, budget, table=table)
    dyadic = dyadic_upper(L, box, phi, budget, table=table)
    if compare(report.value, dyadic) > 0:
        raise InvariantViolation("sum %s exceeds the dyadic bound %s" % (report.value, dyadic))
    lower, upper = envelope(L, box, phi)
    report.dyadic = dyadic
    report.lower, report.upper = lower, upper
    report.phi, report.phi_source = scalar(phi), source
    return report


def sweep_row(L, Q, phi=None, budget=DEFAULT_BUDGET):
    """One row of a sweep table."""
    return sum_report(L, Q, phi, budget).row()


def sweep(L, boxes, phi=None, budget=DEFAULT_BUDGET):
    """Sweep table over a list of boxes."""
    L = _matrix(L)
    return pd.DataFrame([sweep_row(L, Q, phi, budget) for Q in boxes])


SHAPES = ('sym', 'skew', 'skew-rev')


def shape_box(Qgeo, N, shape):
    """
    Box of volume Qgeo^N in one of the shapes ``sym``, ``skew`` (volume on
    the first side) or ``skew-rev`` (volume on the last side).

    >>> shape_box(4, 2, 'sym'), shape_box(4, 2, 'skew'), shape_box(4, 2, 'skew-rev')
    ([4, 4], [16, 1], [1, 16])
    """
    if shape == 'sym':
        return [Qgeo] * N
    if shape == 'skew':
        return [Qgeo ** N] + [1] * (N - 1)
    if shape == 'skew-rev':
        return [1] * (N - 1) + [Qgeo ** N]
    raise PrecondViolation("unknown box shape %r" % shape)


def shape_probe(L, grid, shapes=SHAPES, budget=DEFAULT_BUDGET):
    """
    S_L(Q) against the upper envelope for boxes of equal volume and
    different shapes; ``band`` is the spread max/min of the ratio.
    """
    L = _matrix(L)
    profile = phi_profile(L, grid, budget)
    rows = []
    for X, phi in zip(profile.grid, profile.values):
        for shape in shapes:
            box = BoxSpec(shape_box(X, L.N, shape))
            S = sum_reciprocals(L, box, budget).value
            _, upper = envelope(L, box, phi)
            rows.append({'Qgeo': float(X), 'shape': shape, 'Q': str(box),
                         'S': float(S), 'upper': float(upper), 'phi': float(phi),
                         'ratio': float(S) / float(upper)})
    frame = pd.DataFrame(rows)
    frame['band'] = frame['ratio'].max() / frame['ratio'].min()
    return frame


def fit_constants(frame):
    """
    Geometric-mean constants of S/lower and S/upper over a sweep table, with
    the spread max/min of each ratio.

    >>> frame = pd.DataFrame({'S': [2.0, 8.0], 'lower': [1.0, 2.0], 'upper': [4.0, 8.0]})
    >>> fit_constants(frame)
    {'c_low': 2.82..., 'band_low': 2.0, 'c_up': 0.70..., 'band_up': 2.0}
    """
    out = {}
    for name in ('low', 'up'):
        col = 'lower' if name == 'low' else 'upper'
        ratio = np.asarray(frame['S'], dtype=float) / np.asarray(frame[col], dtype=float)
        out['c_' + name] = float(gmean(ratio))
        out['band_' + name] = float(ratio.max() / ratio.min())
    return out
