"""
Counting the set M(L, eps, T, Q).

An element is a pair (p, q) of integer vectors, q a nonzero point of the
box prod [-Q_j, Q_j], with |L_i q + p_i| <= T for every row and
prod_i |L_i q + p_i| < eps. The same set is the set of points of the
lattice of L in H x box off the plane q = 0, so it can be counted
directly or through lattice enumeration.

>>> inst = CountInstance('sqrt(2)', Fraction(3, 10), Fraction(1, 2), [5])
>>> count_M_direct(inst), count_via_lattice(inst)
(6, 6)
"""

import logging
from fractions import Fraction

import pandas as pd

from .constants import DEFAULT_BUDGET, DEFAULT_MAX_NODES
from .errors import BudgetExceeded, DomainError, PrecondViolation
from .lattice import (BoxSpec, SystemMatrix, build_unipotent_lattice, determinant,
                      lattice_points_in_box, successive_minima)
from .normal import normalize
from .numerics import (certified_sign, compare, exp, log as _log, power,
                       row_value, scalar)
from .partition import (HyperbolicRegion, LogLinear, build_partition,
                        davenport_count_bound, extend_and_compose)

log = logging.getLogger(__name__)


class CountInstance(object):
    """
    The data (L, eps, T, Q) of a counting problem.

    ``L`` may be a :class:`SystemMatrix` or its text form and ``Q`` a
    :class:`BoxSpec` or a list of half-widths.

    >>> CountInstance('sqrt(2)', 0, 1, [4])
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: eps must be positive, got 0
    """

    def __init__(self, L, eps, T, Q, assume_irrational=False):
        if isinstance(L, str):
            L = SystemMatrix.parse(L, assume_irrational=assume_irrational)
        if not isinstance(Q, BoxSpec):
            Q = BoxSpec(Q)
        if Q.N != L.N:
            raise DomainError("box has %d sides but L has %d columns" % (Q.N, L.N))
        self.L = L
        self.Q = Q
        self.eps = scalar(eps)
        self.T = scalar(T)
        if self.eps.sign() <= 0:
            raise DomainError("eps must be positive, got %s" % self.eps)
        if self.T.sign() <= 0:
            raise DomainError("T must be positive, got %s" % self.T)

    @property
    def M(self):
        return self.L.M

    @property
    def N(self):
        return self.L.N

    def __repr__(self):
        return 'CountInstance(%r, %s, %s, %s)' % (str(self.L), self.eps, self.T, self.Q)

    def region(self):
        return HyperbolicRegion(self.M, self.eps, self.T)

    def volume_scale(self):
        """eps * Q**N."""
        return self.eps * self.Q.volume

    def to_record(self):
        return {'L': str(self.L), 'eps': str(self.eps), 'T': str(self.T),
                'Q': [str(q) for q in self.Q.Q]}


def row_values(L, q):
    """The values L_i q, exact when each row lies in one quadratic field."""
    return [row_value(row, q, prec=L.prec) for row in L.rows]


def _product_below(eps, d, fd):
    """
    Whether prod |d_i| < eps, deciding on floats where safe.

    ``fd`` are roundings of the exact ``d``, so the float product carries
    only a relative error.
    """
    prod = 1.0
    for x in fd:
        prod *= abs(x)
    scale = eps.approx() + prod

    def exact():
        acc = scalar(1)
        for x in d:
            acc = acc * abs(x)
        return eps - acc
    return certified_sign(eps.approx() - prod, scale, exact) > 0


def q_chunks(Q, parts):
    """Split the range of q_1 into ``parts`` contiguous pieces."""
    b = Q.int_bounds[0]
    values = list(range(-b, b + 1))
    size = max(1, -(-len(values) // max(parts, 1)))
    return [(values[i], values[min(i + size, len(values)) - 1])
            for i in range(0, len(values), size)]


def count_M_direct(inst, budget=DEFAULT_BUDGET, q1_range=None):
    """
    Count M(L, eps, T, Q) by running over q and the admissible p.

    For each q and row i, p_i runs over the integers in
    [-L_i q - T, -L_i q + T]; the endpoints are exact for exact rows.
    ``q1_range`` restricts q_1 to a closed range so that disjoint chunks can
    be counted separately and added up.
    """
    T = inst.T
    rows = inst.M
    p_width = 2 * T.floor() + 2
    steps = inst.Q.size() * p_width ** rows
    if steps > budget:
        raise BudgetExceeded('direct count', budget, steps)
    total = 0
    for q in inst.Q.points():
        if q1_range is not None and not q1_range[0] <= q[0] <= q1_range[1]:
            continue
        values = row_values(inst.L, q)
        ranges = []
        for v in values:
            ranges.append(range(-((v + T).floor()), (T - v).floor() + 1))
        total += _count_products(inst.eps, values, ranges)
    return total


def _count_products(eps, values, ranges):
    count = 0

    def visit(i, chosen, fchosen):
        nonlocal count
        if i == len(values):
            if _product_below(eps, chosen, fchosen):
                count += 1
            return
        for p in ranges[i]:
            d = values[i] + p
            visit(i + 1, chosen + [d], fchosen + [d.approx()])

    visit(0, [], [])
    return count


def count_via_lattice(inst, budget=DEFAULT_BUDGET):
    """
    Count the points of the lattice of L in H x box with q != 0.

    The lattice is enumerated in the box [-T, T]^M x prod [-Q_j, Q_j]; the
    hyperbolic condition is then tested on each point.
    """
    points = _lattice_points(inst, budget)
    M = inst.M
    total = 0
    for c, x, fx in points:
        if not any(c[M:]):
            continue
        if _product_below(inst.eps, x, fx):
            total += 1
    return total


def _lattice_points(inst, budget):
    basis = build_unipotent_lattice(inst.L)
    M = inst.M
    P = [inst.T] * M + list(inst.Q.Q)
    out = []
    for c in lattice_points_in_box(basis, P, budget):
        q = c[M:]
        x = [v + p for v, p in zip(row_values(inst.L, q), c[:M])]
        out.append((c, x, [v.approx() for v in x]))
    return out


def axis_count(inst):
    """
    (2 floor(T) + 1)^M, the number of lattice points with q = 0 in
    [-T, T]^M x box.

    >>> axis_count(CountInstance('sqrt(2)', 1, Fraction(5, 2), [3]))
    5
    """
    return (2 * inst.T.floor() + 1) ** inst.M


def axis_count_via_lattice(inst, budget=DEFAULT_BUDGET):
    """The same number, counted on the lattice."""
    return sum(1 for c, _, _ in _lattice_points(inst, budget) if not any(c[inst.M:]))


def certainly_empty(inst, phi):
    """
    Whether eps Q^N < phi, in which case M(L, eps, T, Q) is empty when phi
    is a lower bound for prod max(1, |q_j|) prod ||L_i q|| on the box.

    >>> certainly_empty(CountInstance('golden', Fraction(1, 40), 1, [8]), Fraction(38, 100))
    True
    """
    return compare(inst.volume_scale(), scalar(phi)) < 0


def count_bound(inst, phi):
    """
    (1 + T)^(M+N-1) log(T^M/eps)^(M-1) [eps Q^N + (eps Q^N / phi)^((M+N-1)/(M+N))]

    evaluated without its implicit constant; requires T^M/eps >= e^M.

    >>> inst = CountInstance('sqrt(2)', Fraction(1, 8), 1, [4])
    >>> round(float(count_bound(inst, Fraction(3, 10))), 6)
    3.581989
    """
    M, N = inst.M, inst.N
    T, eps = inst.T, inst.eps
    if LogLinear(-M, M, -1).sign(T, eps) < 0:
        raise PrecondViolation("count bound needs T^M/eps >= e^M")
    n = M + N
    x = inst.volume_scale()
    head = (1 + T) ** (n - 1)
    if M > 1:
        head = head * _log(T ** M / eps) ** (M - 1)
    return head * (x + power(x / scalar(phi), Fraction(n - 1, n)))


def slow_case_determinant(M, N, theta, Q, s0, c=0, prec=None):
    """
    theta^(M (1 - (s0 - M)/N)) e^(-M c) prod_(j <= s0 - M) Q/Q_j, the
    volume of the first s0 coordinates of the transformed lattice.
    """
    if not M + 1 <= s0 <= M + N:
        raise DomainError("s0 must lie in [M + 1, M + N], got %d" % s0)
    Qg = Q.Q_geo
    out = power(theta, Fraction(M * (N - (s0 - M)), N), prec)
    if c:
        out = out * exp(-M * scalar(Fraction(c)), prec)
    for j in range(s0 - M):
        out = out * Qg / Q.Q[j]
    return out


def corner_determinant(basis, s0):
    """Determinant of the top-left s0 x s0 block of the basis matrix."""
    return determinant([[basis.vectors[i][h] for h in range(s0)] for i in range(s0)],
                       prec=319)


class RatioBoundReport(object):
    """
    Minima ratios (eps Q^N)^(s/(M+N)) / (lambda_1 ... lambda_s) per cell
    and s, next to the bound of the branch that applies.
    """

    def __init__(self, inst, rows, phi, phi_source, cases):
        self.inst = inst
        self.rows = rows
        self.phi = phi
        self.phi_source = phi_source
        self.cases = cases

    def __repr__(self):
        return '<RatioBoundReport cells=%d fitted=%.4g>' % (len(self.cases), self.fitted)

    @property
    def fitted(self):
        """The largest lhs/rhs over all rows."""
        return max(r['fitted'] for r in self.rows)

    def to_frame(self):
        frame = pd.DataFrame(self.rows)
        frame['phi'] = float(self.phi)
        frame['phi_source'] = self.phi_source
        return frame


def ratio_bound_rows(inst, basis, phi, T=None, key=(), max_nodes=DEFAULT_MAX_NODES):
    """Ratio rows of one transformed lattice; returns (rows, ladder)."""
    T = inst.T if T is None else scalar(T)
    M, N = inst.M, inst.N
    n = M + N
    report = successive_minima(basis, max_nodes)
    _, ladder = normalize(basis, report, M, max_nodes)
    x = inst.volume_scale()
    ratio = x / scalar(phi)
    full = 1 + T ** (n - 1) + x + power(ratio, Fraction(n - 1, n))
    rows = []
    for s in range(1, n + 1):
        lhs = power(x, Fraction(s, n)) / report.product(s)
        branch = ladder.branch(s)
        if branch == 'zero_q':
            rhs = T ** s
        elif branch == 'naive':
            rhs = 1 + power(ratio, Fraction(s, M + max(ladder.h[0], 1)))
        elif branch == 'quick':
            rhs = 1 + power(ratio, Fraction(s, s + 1))
        else:
            rhs = x
        rows.append({
            'k': ' '.join(str(v) for v in key),
            's': s,
            'lhs': float(lhs),
            'rhs': float(rhs),
            'case': ladder.case,
            'branch': branch,
            'fitted': float(lhs / rhs),
            'full_rhs': float(full),
        })
    return rows, ladder


def ratio_bounds(inst, partition=None, phi=None, phi_source='assumed',
                 max_nodes=DEFAULT_MAX_NODES):
    """
    Minima ratios of every cell's transformed lattice against the quick,
    slow, q = 0 and small-s bounds.

    ``phi`` is the value of the approximation function at Q, either asserted
    by the caller or an empirical minimum; ``phi_source`` records which.
    """
    if phi is None:
        raise PrecondViolation("ratio bounds need a value of phi at Q")
    if partition is None:
        partition = build_partition(inst.region())
    rows = []
    cases = []
    for cell in partition.cells:
        basis = extend_and_compose(cell, inst.L, inst.Q)
        cell_rows, ladder = ratio_bound_rows(inst, basis, phi, key=cell.k,
                                             max_nodes=max_nodes)
        rows.extend(cell_rows)
        cases.append((cell.k, ladder.case, ladder.s0))
        log.debug("cell %s: %s", cell.k, ladder)
    return RatioBoundReport(inst, rows, scalar(phi), phi_source, cases)


def cell_counts(inst, partition=None, budget=DEFAULT_BUDGET, max_nodes=DEFAULT_MAX_NODES):
    """
    Per-cell counts of M(L, eps, T, Q) next to the Davenport bound of the
    cell's transformed lattice in the cube of half-width (eps Q^N)^(1/(M+N)).
    """
    if partition is None:
        partition = build_partition(inst.region())
    M, N = inst.M, inst.N
    counts = [0] * len(partition.cells)
    outside = 0
    for c, x, fx in _lattice_points(inst, budget):
        if not any(c[M:]) or not _product_below(inst.eps, x, fx):
            continue
        idx = int(partition.locate([fx])[0])
        if idx < 0:
            outside += 1
        else:
            counts[idx] += 1
    if outside:
        log.warning("%d points with a vanishing coordinate were not located", outside)
    half = power(inst.volume_scale(), Fraction(1, M + N))
    rows = []
    for cell, count in zip(partition.cells, counts):
        basis = extend_and_compose(cell, inst.L, inst.Q)
        report = successive_minima(basis, max_nodes)
        bound = davenport_count_bound(report, [half] * (M + N))
        rows.append({'k': ' '.join(str(v) for v in cell.k), 'count': count,
                     'bound': float(bound), 'ratio': count / float(bound)})
    return pd.DataFrame(rows)

