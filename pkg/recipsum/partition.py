"""
Partition of the hyperbolic region into cells with unimodular scalings.

The region is H = {x in R^M : prod |x_i| < eps, |x_i| <= T}; H+ removes the
coordinate hyperplanes. With delta = eps**(1/M), the first M - 1
coordinates are layered by

    k_i = min(floor(log(T / |x_i|)), K)

over half-open layers (T e^-(k+1), T e^-k]. The last coordinate is bounded
by the product constraint. Every cell k carries exponents a_i with
sum a_i = 0, and the map x_i -> exp(a_i - c) x_i sends the cell into the
cube [-delta, delta]^M. Exponents are kept as exact :class:`LogLinear`
combinations of 1, log T and log eps.

>>> part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
>>> part.K, len(part.cells), part.c
(4, 5, Fraction(1, 2))
>>> all(sum(cell.a, LogLinear()).is_zero() for cell in part.cells)
True
"""

import itertools
import logging
import math
from fractions import Fraction

import numpy as np
import pandas as pd

from .errors import DomainError, InvariantViolation, NotInRegion, PrecondViolation
from .lattice import build_unipotent_lattice, scale_lattice, theta_from_volume
from .numerics import compare, exp, log as _log, power, scalar

log = logging.getLogger(__name__)


class LogLinear(object):
    """
    The real number const + t*log(T) + e*log(eps) with rational coefficients.

    >>> a = LogLinear(1, -1, Fraction(1, 2))
    >>> print(a)
    1 - log T + 1/2 log eps
    >>> print(a - a)
    0
    >>> round(a.to_float(math.e, 1), 12)
    0.0
    """

    __slots__ = ('const', 'logT', 'logeps')

    def __init__(self, const=0, logT=0, logeps=0):
        self.const = Fraction(const)
        self.logT = Fraction(logT)
        self.logeps = Fraction(logeps)

    def __add__(self, other):
        return LogLinear(self.const + other.const, self.logT + other.logT,
                         self.logeps + other.logeps)

    __radd__ = __add__

    def __sub__(self, other):
        return LogLinear(self.const - other.const, self.logT - other.logT,
                         self.logeps - other.logeps)

    def __neg__(self):
        return LogLinear(-self.const, -self.logT, -self.logeps)

    def __mul__(self, f):
        f = Fraction(f)
        return LogLinear(self.const * f, self.logT * f, self.logeps * f)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LogLinear) and self.coefficients() == other.coefficients()

    def __hash__(self):
        return hash(self.coefficients())

    def coefficients(self):
        return (self.const, self.logT, self.logeps)

    def is_zero(self):
        return not any(self.coefficients())

    def __repr__(self):
        return 'LogLinear(%r, %r, %r)' % tuple(str(x) for x in self.coefficients())

    def __str__(self):
        parts = []
        for coef, name in zip(self.coefficients(), ('', 'log T', 'log eps')):
            if not coef:
                continue
            mag = abs(coef)
            if name:
                text = name if mag == 1 else '%s %s' % (mag, name)
            else:
                text = str(mag)
            if not parts:
                parts.append(('-' if coef < 0 else '') + text)
            else:
                parts.append(('- ' if coef < 0 else '+ ') + text)
        return ' '.join(parts) if parts else '0'

    def to_float(self, T, eps):
        return float(self.const + self.logT * math.log(float(T))
                     + self.logeps * math.log(float(eps)))

    def value(self, T, eps, prec=None):
        """High-precision value for the given T and eps."""
        acc = scalar(self.const)
        if self.logT:
            acc = acc + _log(T, prec) * self.logT
        if self.logeps:
            acc = acc + _log(eps, prec) * self.logeps
        return acc

    def sign(self, T, eps, prec=None):
        """Sign, exact when the value is identically zero."""
        if self.is_zero():
            return 0
        if not self.logT and not self.logeps:
            return (self.const > 0) - (self.const < 0)
        return self.value(T, eps, prec).sign()

    def to_record(self):
        return [str(x) for x in self.coefficients()]


class HyperbolicRegion(object):
    """
    The region {x : prod |x_i| < eps, |x_i| <= T} in R^M.

    >>> HyperbolicRegion(2, 0, 1)
    Traceback (most recent call last):
        ...
    recipsum.errors.DomainError: eps must be positive, got 0
    """

    def __init__(self, M, eps, T):
        if M < 1:
            raise DomainError("M must be positive, got %d" % M)
        self.M = M
        self.eps = scalar(eps)
        self.T = scalar(T)
        if self.eps.sign() <= 0:
            raise DomainError("eps must be positive, got %s" % self.eps)
        if self.T.sign() <= 0:
            raise DomainError("T must be positive, got %s" % self.T)
        self._eps = self.eps.approx()
        self._T = self.T.approx()

    def __repr__(self):
        return 'HyperbolicRegion(%d, %s, %s)' % (self.M, self.eps, self.T)

    @property
    def delta(self):
        return power(self.eps, Fraction(1, self.M))

    def spread(self):
        """log(T / delta) as a float."""
        return math.log(self._T) - math.log(self._eps) / self.M

    def admits_partition(self):
        """Whether T**M / eps > e**M."""
        # log(T**M / eps) - M
        return (LogLinear(-self.M, self.M, -1).sign(self.T, self.eps)) > 0

    def contains(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        return bool(np.all(ax > 0) and np.all(ax <= self._T) and np.prod(ax) < self._eps)


class PartitionCell(object):
    """
    One cell X_k of the partition.

    ``a`` holds the exponents a_i as :class:`LogLinear` values, ``scales``
    the float factors exp(a_i - c) and ``bound`` the certified sup of
    |x_M| over the cell.
    """

    def __init__(self, index, k, a, c, K, bound, region):
        self.index = index
        self.k = tuple(k)
        self.a = tuple(a)
        self.c = c
        self.K = K
        self.capped = any(ki == K for ki in self.k)
        self.bound = bound
        self.region = region
        T, eps = region.T, region.eps
        self.scales = np.array([math.exp((ai - LogLinear(c)).to_float(T, eps)) for ai in self.a])

    def __repr__(self):
        return '<PartitionCell k=%s>' % (self.k,)

    def scale_factors(self, prec=None):
        """exp(a_i - c) as high-precision scalars."""
        T, eps = self.region.T, self.region.eps
        return [exp((ai - LogLinear(self.c)).value(T, eps, prec), prec) for ai in self.a]

    def apply(self, x):
        return self.scales * np.asarray(x, dtype=float)

    def bounds(self):
        """Half-open (lo, hi] ranges of |x_i| for i < M and (0, sup) for x_M."""
        T = self.region._T
        out = []
        for ki in self.k:
            hi = T * math.exp(-ki)
            lo = 0.0 if ki == self.K else T * math.exp(-(ki + 1))
            out.append((lo, hi))
        out.append((0.0, math.exp(self.bound.to_float(self.region.T, self.region.eps))))
        return out

    def margins(self):
        """
        log(exp(a_i - c) * sup|x_i| / delta) per coordinate; all must be <= 0.
        """
        M = self.region.M
        log_delta = LogLinear(0, 0, Fraction(1, M))
        out = []
        for i, ai in enumerate(self.a):
            top = LogLinear(-self.k[i], 1, 0) if i < M - 1 else self.bound
            out.append(ai - LogLinear(self.c) + top - log_delta)
        return out

    def to_record(self):
        return {
            'k': list(self.k),
            'a': [ai.to_record() for ai in self.a],
            'capped': self.capped,
            'bound': self.bound.to_record(),
            'scales': self.scales.tolist(),
        }


class Partition(object):
    """
    Cells of H+ together with the renormalisation constant and the recorded
    constants of the construction.
    """

    def __init__(self, region, cells, c, K, kappa, C):
        self.region = region
        self.cells = tuple(cells)
        self.c = c
        self.K = K
        self.kappa = kappa
        self.C = C
        self._shape = (K + 1,) * (region.M - 1)

    def __repr__(self):
        return '<Partition M=%d cells=%d>' % (self.region.M, len(self.cells))

    def __len__(self):
        return len(self.cells)

    def locate(self, points):
        """
        Cell index of every row of ``points``; -1 outside H+.

        >>> part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
        >>> part.locate([[0.5, 0.01], [0.001, 0.5], [0.5, 0.5]]).tolist()
        [0, 4, -1]
        """
        x = np.atleast_2d(np.asarray(points, dtype=float))
        ax = np.abs(x)
        inside = np.all(ax > 0, axis=1) & np.all(ax <= self.region._T, axis=1) \
            & (np.prod(ax, axis=1) < self.region._eps)
        M = self.region.M
        if M == 1:
            idx = np.zeros(len(x), dtype=int)
        else:
            with np.errstate(divide='ignore'):
                k = np.floor(np.log(self.region._T / ax[:, :M - 1]))
            k = np.clip(np.nan_to_num(k, posinf=self.K), 0, self.K).astype(int)
            idx = np.ravel_multi_index(k.T, self._shape)
        idx[~inside] = -1
        return idx

    def to_frame(self):
        rows = []
        for cell in self.cells:
            row = {'k': ' '.join(str(x) for x in cell.k), 'capped': cell.capped}
            for i, ai in enumerate(cell.a):
                row['a%d' % (i + 1)] = str(ai)
                row['scale%d' % (i + 1)] = cell.scales[i]
            row['bound'] = str(cell.bound)
            rows.append(row)
        frame = pd.DataFrame(rows)
        frame['kappa'] = self.kappa
        return frame


def build_partition(region, check=True):
    """
    Partition H+ into cells.

    Layers are cut at K = ceil(log(T**M / eps)) - (M - 1), which keeps the
    product of the provisional scales at least e^-(M-1) = e^(-M c) in every
    cell, so the common renormalisation only shrinks.

    >>> part = build_partition(HyperbolicRegion(1, Fraction(1, 4), 1))
    >>> len(part), part.cells[0].a, part.cells[0].scales.tolist()
    (1, (LogLinear('0', '0', '0'),), [1.0])
    >>> build_partition(HyperbolicRegion(2, 1, 1))
    Traceback (most recent call last):
        ...
    recipsum.errors.PrecondViolation: T^M/eps = 1 must exceed e^M
    """
    M = region.M
    T, eps = region.T, region.eps
    if not region.admits_partition():
        raise PrecondViolation("T^M/eps = %s must exceed e^M" % (T ** M / eps))
    c = Fraction(M - 1, M)
    width = LogLinear(0, M, -1).value(T, eps)
    K = max(-((-width).floor()) - (M - 1), 1) if M > 1 else 0
    log_delta = LogLinear(0, 0, Fraction(1, M))
    cells = []
    for index, k in enumerate(itertools.product(range(K + 1), repeat=M - 1)):
        capped = any(ki == K for ki in k)
        # log of eps e^(M-1+sum k) / T^(M-1)
        product_bound = LogLinear(M - 1 + sum(k), -(M - 1), 1)
        if capped or (product_bound - LogLinear(0, 1, 0)).sign(T, eps) >= 0:
            bound = LogLinear(0, 1, 0)
        else:
            bound = product_bound
        logs = [log_delta + LogLinear(ki, -1, 0) for ki in k]
        logs.append(log_delta - bound)
        mean = sum(logs, LogLinear()) * Fraction(1, M)
        a = [li - mean for li in logs]
        cells.append(PartitionCell(index, k, a, c, K, bound, region))
    kappa = min(math.exp((ai - LogLinear(c) - log_delta + LogLinear(0, 1, 0)).to_float(T, eps))
                for cell in cells for ai in cell.a)
    spread = region.spread()
    C = len(cells) / spread ** (M - 1)
    part = Partition(region, cells, c, K, kappa, C)
    if check:
        check_partition(part)
    log.info("partition of H+ for M=%d: %d cells, kappa=%.4g", M, len(cells), kappa)
    return part


def check_partition(part):
    """
    Verify zero exponent sums and containment on every cell, exactly where
    possible.
    """
    T, eps = part.region.T, part.region.eps
    for cell in part.cells:
        if not sum(cell.a, LogLinear()).is_zero():
            raise InvariantViolation("exponents of cell %s do not sum to 0" % (cell.k,))
        for i, margin in enumerate(cell.margins()):
            if margin.sign(T, eps) > 0:
                raise InvariantViolation("cell %s leaves the cube in coordinate %d"
                                         % (cell.k, i + 1))
    return True


def cell_of(part, x):
    """
    The cell containing ``x``.

    >>> part = build_partition(HyperbolicRegion(2, Fraction(1, 100), 1))
    >>> cell_of(part, [0.9, 0.001]).k
    (0,)
    >>> cell_of(part, [0.0, 0.001])
    Traceback (most recent call last):
        ...
    recipsum.errors.NotInRegion: point (0.0, 0.001) is not in H+
    """
    idx = int(part.locate([x])[0])
    if idx < 0:
        raise NotInRegion("point %s is not in H+" % (tuple(float(v) for v in x),))
    return part.cells[idx]


def sample_region(region, n, rng=None):
    """
    ``n`` points of H+, log-uniform in each |x_i| with random signs.

    >>> pts = sample_region(HyperbolicRegion(2, Fraction(1, 10), 1), 50, np.random.default_rng(1))
    >>> pts.shape
    (50, 2)
    """
    rng = np.random.default_rng(rng)
    M = region.M
    top = math.log(region._T)
    width = M * top - math.log(region._eps) + 2.0
    out = []
    have = 0
    while have < n:
        logs = top - width * rng.random((max(2 * (n - have), 16), M))
        x = np.exp(logs) * rng.choice([-1.0, 1.0], size=logs.shape)
        ok = np.prod(np.abs(x), axis=1) < region._eps
        x = x[ok & np.all(x != 0, axis=1)]
        out.append(x)
        have += len(x)
    return np.concatenate(out)[:n]


def extend_and_compose(cell, L, Q, eps=None, T=None, prec=None):
    """
    Basis of the image of the lattice of L under the cell scaling, the box
    map y_j -> (Q/Q_j) y_j and the map (x, y) -> (theta x, theta^(-M/N) y).

    The reference box [-delta, delta]^M x prod [-Q_j, Q_j] must land on the
    cube of half-width (eps Q^N)**(1/(M+N)); this is checked on its corners.
    """
    region = cell.region
    for given, own, name in ((eps, region.eps, 'eps'), (T, region.T, 'T')):
        if given is not None and compare(scalar(given), own) != 0:
            raise DomainError("%s = %s differs from the partition's %s" % (name, given, own))
    eps = region.eps
    M, N = L.M, L.N
    if M != region.M:
        raise DomainError("cell is for M=%d but L has %d rows" % (region.M, M))
    th = theta_from_volume(eps, Q.volume, M, N, prec)
    Qg = Q.Q_geo
    mu = [th * f for f in cell.scale_factors(prec)]
    y_scale = power(th, Fraction(-M, N), prec)
    nu = [y_scale * Qg / q for q in Q.Q]
    half = power(eps * Q.volume, Fraction(1, M + N), prec)
    corners = [th * region.delta] + [f * q for f, q in zip(nu, Q.Q)]
    for h, v in enumerate(corners):
        rel = abs(v - half) / half
        if compare(rel, Fraction(1, 2 ** 60)) > 0:
            raise InvariantViolation("corner %d of the reference box maps to %s, not %s"
                                     % (h + 1, v, half))
    basis = build_unipotent_lattice(L)
    return scale_lattice(basis, mu, nu)


def davenport_count_bound(report, P):
    """
    1 + sum_s V_s / (lambda_1 ... lambda_s), with V_s the largest product of
    s of the half-widths.

    >>> from recipsum.lattice import standard_lattice, successive_minima
    >>> r = successive_minima(standard_lattice(2))
    >>> davenport_count_bound(r, [1, 1]), davenport_count_bound(r, [3, 2])
    (ExactQuadratic(3, 0, 1, 1), ExactQuadratic(10, 0, 1, 1))
    """
    P = sorted((scalar(p) for p in P), reverse=True)
    if len(P) != report.dim:
        raise DomainError("need %d half-widths, got %d" % (report.dim, len(P)))
    total = scalar(1)
    volume = scalar(1)
    lam = scalar(1)
    for p, x in zip(P, report.lambdas):
        volume = volume * p
        lam = lam * x
        total = total + volume / lam
    return total
