import numpy as np
import pytest

from recipsum import suite
from recipsum.errors import DomainError, PrecondViolation
from recipsum.suite import (CheckResult, check_davenport, check_emptiness, check_identity,
                            check_minima, check_partition, check_weights, random_lattice,
                            random_matrix, results_frame, run_check, run_suite)


@pytest.mark.parametrize('name, func', [
    ('identity', lambda rng: check_identity(rng, instances=5)),
    ('emptiness', lambda rng: check_emptiness(rng, heights=range(2, 9))),
    ('weights', check_weights),
    ('minima', lambda rng: check_minima(rng, lattices=4, max_dim=3)),
    ('partition', lambda rng: check_partition(rng, samples=2000)),
    ('davenport', lambda rng: check_davenport(rng, lattices=4)),
])
def test_single_checks_pass(name, func):
    result = run_check(name, func, np.random.default_rng(1))
    assert result.passed, result.detail


def test_minima_check_rejects_failed_certificate(monkeypatch):
    normalize = suite.normalize

    def stretched(basis, report, M):
        nb, ladder = normalize(basis, report, M=M)
        nb.certificate = (False,) * nb.dim
        return nb, ladder

    monkeypatch.setattr(suite, 'normalize', stretched)
    passed, detail = check_minima(np.random.default_rng(0), lattices=2, max_dim=3)
    assert not passed
    assert {f['error'] for f in detail['failed']} == {'norm certificate'}


def test_davenport_fit_per_dimension():
    passed, detail = check_davenport(np.random.default_rng(2), lattices=24, max_dim=2)
    assert set(detail['fitted']) == {'1', '2'}
    assert set(detail['spread']) == {'1', '2'}
    assert passed, detail
    # on dZ the ratio is largest for d = 1: 7 points against 1 + 3
    assert detail['fitted']['1'] <= 1.75


def test_failing_check_is_recorded():
    def broken(rng):
        raise PrecondViolation('no room')
    result = run_check('broken', broken, np.random.default_rng(0))
    assert not result.passed
    assert result.to_record()['detail'] == {'error': 'PrecondViolation: no room'}


def test_run_suite_subset():
    results = run_suite('desk', seed=3, only=('weights', 'emptiness'))
    assert [r.name for r in results] == ['emptiness', 'weights']
    frame = results_frame(results)
    assert frame['passed'].all()
    assert list(frame.columns) == ['check', 'passed', 'seconds']


def test_desk_suite_names():
    assert [name for name, _ in suite.DESK] == [
        'identity', 'emptiness', 'weights', 'minima', 'partition', 'davenport', 'sums',
        'shapes', 'slow_case']


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite('cluster')


def test_record():
    record = CheckResult('x', True, {'n': 1}, 0.12345).to_record()
    assert record == {'check': 'x', 'passed': True, 'seconds': 0.123, 'detail': {'n': 1}}


def test_random_inputs():
    rng = np.random.default_rng(0)
    L = random_matrix(rng, 2, 3)
    assert (L.M, L.N) == (2, 3)
    basis = random_lattice(rng, 3)
    assert basis.det != 0
