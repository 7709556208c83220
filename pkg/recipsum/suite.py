"""
Seeded desk-scale checks of the exact identities and inequalities.

Each check returns a :class:`CheckResult`; :func:`run_suite` runs them all
and never raises for a failed check, so the caller decides what a failure
means.

>>> result = run_check('weights', check_weights, np.random.default_rng(0))
>>> result.name, result.passed
('weights', True)
"""

import logging
import math
import time
from fractions import Fraction

import numpy as np
import pandas as pd

from .counting import (CountInstance, certainly_empty, corner_determinant, count_M_direct,
                       count_via_lattice, slow_case_determinant)
from .errors import DomainError, InvariantViolation, RecipsumError
from .lattice import (LatticeBasis, SystemMatrix, lattice_points_in_box, minkowski_check,
                      successive_minima, theta_from_volume)
from .normal import normalize
from .numerics import compare
from .partition import (HyperbolicRegion, build_partition, davenport_count_bound,
                        extend_and_compose, sample_region)
from .sums import empirical_phi, fit_constants, shape_probe, sweep
from .weights import exhaustive_check

log = logging.getLogger(__name__)

ENTRY_POOL = ('sqrt(2)', 'sqrt(3)', 'golden', 'sqrt(7)', 'sqrt(11)/2', '1+sqrt(6)')
WEIGHT_SHAPES = ((1, 2), (1, 3), (2, 2), (2, 3), (3, 2))


class CheckResult(object):

    def __init__(self, name, passed, detail=None, seconds=0.0):
        self.name = name
        self.passed = bool(passed)
        self.detail = detail or {}
        self.seconds = seconds

    def __repr__(self):
        return '<CheckResult %s %s>' % (self.name, 'ok' if self.passed else 'FAILED')

    def to_record(self):
        return {'check': self.name, 'passed': self.passed, 'seconds': round(self.seconds, 3),
                'detail': self.detail}


def random_matrix(rng, M, N):
    """A random M x N matrix over ENTRY_POOL with distinct radicands per row."""
    rows = []
    for _ in range(M):
        picks = rng.choice(len(ENTRY_POOL), size=N, replace=False)
        rows.append(','.join(ENTRY_POOL[i] for i in picks))
    return SystemMatrix.parse(';'.join(rows))


def random_lattice(rng, n, spread=4):
    """A random full-rank integer lattice of dimension n."""
    while True:
        vectors = rng.integers(-spread, spread + 1, size=(n, n)).tolist()
        try:
            return LatticeBasis(vectors)
        except DomainError:
            continue


def check_identity(rng, instances=200):
    """Direct and lattice counts agree."""
    mismatches = []
    for _ in range(instances):
        M, N = (int(v) for v in rng.integers(1, 3, size=2))
        L = random_matrix(rng, M, N)
        # boxes with two sides stay small enough for the direct count
        top = 21 if N == 1 else (7 if M == 1 else 4)
        Q = [int(v) for v in rng.integers(1, top, size=N)]
        T = Fraction(int(rng.integers(1, 7)), 2)
        eps = Fraction(1, 2 ** int(rng.integers(0, 4)))
        inst = CountInstance(L, eps, T, Q)
        a, b = count_M_direct(inst), count_via_lattice(inst)
        if a != b:
            mismatches.append({'instance': repr(inst), 'direct': a, 'lattice': b})
    return not mismatches, {'instances': instances, 'mismatches': mismatches}


def check_emptiness(rng, heights=range(2, 65)):
    """eps Q < phi forces an empty count for the golden ratio."""
    L = SystemMatrix.parse('golden')
    bad = []
    for Q in heights:
        phi = empirical_phi(L, [Q])
        k = 0
        while compare(Fraction(Q, 2 ** k), phi) >= 0:
            k += 1
        inst = CountInstance(L, Fraction(1, 2 ** k), 1, [Q])
        if not certainly_empty(inst, phi) or count_M_direct(inst) != 0:
            bad.append(Q)
    return not bad, {'heights': len(heights), 'failed': bad}


def check_weights(rng):
    """Exhaustive weight tables."""
    failed = {}
    for M, N in WEIGHT_SHAPES:
        frame = exhaustive_check(M, N)
        if not frame['ok'].all():
            failed['%d,%d' % (M, N)] = int((~frame['ok']).sum())
    return not failed, {'shapes': len(WEIGHT_SHAPES), 'failed': failed}


def check_minima(rng, lattices=100, max_dim=5):
    """
    Minkowski's second theorem, nested supports, unimodularity and the norm
    certificate of the normalized basis on random lattices.
    """
    bad = []
    for i in range(lattices):
        n = int(rng.integers(2, max_dim + 1))
        basis = random_lattice(rng, n)
        report = successive_minima(basis)
        try:
            minkowski_check(report, basis.det)
        except InvariantViolation as err:
            bad.append({'lattice': i, 'error': str(err)})
            continue
        nb, _ = normalize(basis, report, M=1)
        if not nb.is_nested() or abs(nb.change_of_basis_det()) != 1:
            bad.append({'lattice': i, 'error': 'supports or unimodularity'})
        elif nb.certificate is None or not all(nb.certificate):
            bad.append({'lattice': i, 'error': 'norm certificate'})
    return not bad, {'lattices': lattices, 'failed': bad}


def check_partition(rng, samples=100000):
    """
    Coverage, containment, the cell count bound and kappa >= e^(-2M) of the
    partition.
    """
    configs = ((1, Fraction(1, 100), 1), (2, Fraction(1, 100), 1), (3, Fraction(1, 1000), 1))
    bad = []
    for M, eps, T in configs:
        region = HyperbolicRegion(M, eps, T)
        part = build_partition(region)
        pts = sample_region(region, samples, rng)
        idx = part.locate(pts)
        delta = region.delta.approx()
        scales = np.array([cell.scales for cell in part.cells])
        scaled = scales[idx] * pts
        covered = bool(np.all(idx >= 0))
        contained = bool(np.all(np.abs(scaled) <= delta * (1 + 1e-9)))
        limit = 4 ** M * region.spread() ** (M - 1)
        kappa_floor = math.exp(-2 * M)
        if not (covered and contained and len(part) <= limit
                and part.kappa >= kappa_floor):
            bad.append({'M': M, 'covered': covered, 'contained': contained,
                        'cells': len(part), 'limit': limit, 'kappa': part.kappa})
    return not bad, {'configs': len(configs), 'samples': samples, 'failed': bad}


def check_davenport(rng, lattices=100, max_dim=4):
    """
    Box counts against the Davenport bound.

    Dimensions cycle through 1..max_dim and every box has half-width
    floor(2 lambda_n) + 1, so all terms of the bound take part. Per
    dimension c_n is the largest ratio count / bound, so every instance is at
    most c_n times its bound; ``spread`` is how far c_n falls when its
    largest instance is left out, and must stay within 50%. On cubes the
    count is also at most 2^(n-1) (2 sqrt(n) + 1)^n times the bound.
    """
    ratios = {}
    bad = []
    for i in range(lattices):
        n = i % max_dim + 1
        basis = random_lattice(rng, n)
        report = successive_minima(basis)
        p = (report.lambdas[-1] * 2).floor() + 1
        count = len(lattice_points_in_box(basis, [p] * n))
        bound = float(davenport_count_bound(report, [p] * n))
        ratio = count / bound
        ratios.setdefault(n, []).append(ratio)
        if ratio > 2 ** (n - 1) * (2 * math.sqrt(n) + 1) ** n:
            bad.append({'dim': n, 'ratio': ratio})
    fitted = {}
    spread = {}
    for n, r in sorted(ratios.items()):
        top = sorted(r, reverse=True)
        fitted[str(n)] = top[0]
        if len(top) > 1:
            spread[str(n)] = 1 - top[1] / top[0]
            if spread[str(n)] > 0.5:
                bad.append({'dim': n, 'spread': spread[str(n)]})
    return not bad, {'lattices': lattices, 'fitted': fitted, 'spread': spread,
                     'failed': bad}


def check_sums(rng, heights=tuple(2 ** e for e in range(4, 13))):
    """Dyadic domination and the lower envelope shape for sqrt(2)."""
    try:
        frame = sweep('sqrt(2)', [[Q] for Q in heights])
    except InvariantViolation as err:
        return False, {'error': str(err)}
    fit = fit_constants(frame)
    dominated = bool((frame['S'] <= frame['dyadic']).all())
    return dominated and fit['band_low'] <= 3, dict(fit, dominated=dominated)


def check_shapes(rng, grid=(4, 8, 16, 32, 64)):
    """S over the upper envelope for square and skewed boxes of one volume."""
    frame = shape_probe('sqrt(2),sqrt(3)', list(grid))
    band = float(frame['band'].iloc[0])
    return band <= 4, {'points': len(frame), 'band': band}


def check_slow_case(rng, instances=20):
    """Determinants of leading blocks of transformed lattices."""
    worst = Fraction(0)
    for _ in range(instances):
        M, N = (int(v) for v in rng.integers(1, 3, size=2))
        L = random_matrix(rng, M, N)
        Q = [int(v) for v in rng.integers(1, 9, size=N)]
        eps = Fraction(1, 10 ** int(rng.integers(2, 4)))
        inst = CountInstance(L, eps, 1, Q)
        part = build_partition(inst.region())
        cell = part.cells[int(rng.integers(0, len(part)))]
        basis = extend_and_compose(cell, L, inst.Q)
        th = theta_from_volume(eps, inst.Q.volume, M, N)
        for s0 in range(M + 1, M + N + 1):
            got = corner_determinant(basis, s0)
            want = slow_case_determinant(M, N, th, inst.Q, s0, part.c)
            err = abs(got - want) / abs(want)
            worst = max(worst, err.to_fraction())
    return worst < Fraction(1, 10 ** 20), {'instances': instances, 'worst': float(worst)}


DESK = (
    ('identity', check_identity),
    ('emptiness', check_emptiness),
    ('weights', check_weights),
    ('minima', check_minima),
    ('partition', check_partition),
    ('davenport', check_davenport),
    ('sums', check_sums),
    ('shapes', check_shapes),
    ('slow_case', check_slow_case),
)

SUITES = {'desk': DESK}


def run_check(name, func, rng):
    start = time.perf_counter()
    try:
        passed, detail = func(rng)
    except RecipsumError as err:
        passed, detail = False, {'error': '%s: %s' % (type(err).__name__, err)}
    result = CheckResult(name, passed, detail, time.perf_counter() - start)
    log.info("%s: %s in %.2fs", name, 'ok' if result.passed else 'FAILED', result.seconds)
    return result


def run_suite(suite='desk', seed=0, only=None):
    """Run the checks of a suite, each with its own seeded generator."""
    try:
        checks = SUITES[suite]
    except KeyError:
        raise DomainError("unknown suite %r" % suite)
    results = []
    for i, (name, func) in enumerate(checks):
        if only is not None and name not in only:
            continue
        results.append(run_check(name, func, np.random.default_rng([seed, i])))
    return results


def results_frame(results):
    return pd.DataFrame([{'check': r.name, 'passed': r.passed, 'seconds': r.seconds}
                         for r in results])
