import json

import pandas as pd
import pytest

from recipsum.cli import RunConfig, main, parse_config, qgeo_grid
from recipsum.errors import ConfigError


def run(tmp_path, *argv):
    return main(list(argv) + ['--out', str(tmp_path), '-q'])


def test_count(tmp_path, capsys):
    code = run(tmp_path, 'count', '--matrix', 'sqrt(2)', '--eps', '0.3', '--T', '0.5',
               '--Q', '5')
    assert code == 0
    assert capsys.readouterr().out.strip() == '6'
    frame = pd.read_csv(tmp_path / 'count.csv')
    assert frame['count'].tolist() == [6]
    assert frame['schema_version'].tolist() == [1]
    record = json.loads((tmp_path / 'count.jsonl').read_text().splitlines()[0])
    assert record['count'] == 6


def test_count_with_workers(tmp_path, capsys):
    code = run(tmp_path, 'count', '--matrix', 'sqrt(2)', '--eps', '0.3', '--T', '0.5',
               '--Q', '5', '--threads', '2')
    assert code == 0
    assert capsys.readouterr().out.strip() == '6'


def test_bad_box_is_a_config_error(tmp_path):
    assert run(tmp_path, 'sum', '--matrix', 'sqrt(2)', '--Q', '0.5') == 2


def test_missing_argument(tmp_path):
    assert run(tmp_path, 'sum', '--matrix', 'sqrt(2)') == 2


def test_budget_exit_code(tmp_path):
    code = run(tmp_path, 'count', '--matrix', 'sqrt(2)', '--eps', '0.3', '--T', '0.5',
               '--Q', '5', '--budget', '5')
    assert code == 3


def test_sum(tmp_path):
    assert run(tmp_path, 'sum', '--matrix', 'sqrt(2)', '--Q', '16') == 0
    frame = pd.read_csv(tmp_path / 'sum.csv')
    assert len(frame) == 1
    assert frame['S'][0] <= frame['dyadic'][0]
    lines = (tmp_path / 'sum.jsonl').read_text().splitlines()
    assert json.loads(lines[0])['phi_source'] == 'empirical'
    assert json.loads(lines[1])['k'] == 0


def test_sweep_with_gnuplot(tmp_path):
    code = run(tmp_path, 'sweep', '--matrix', 'golden', '--Qgeo', '4..16',
               '--shapes', 'sym', '--emit-gnuplot')
    assert code == 0
    frame = pd.read_csv(tmp_path / 'sweep.csv')
    assert frame['Qgeo'].tolist() == [4.0, 8.0, 16.0]
    assert (tmp_path / 'sweep.gp').read_text().startswith("set datafile separator ','")


def test_unknown_shape(tmp_path):
    assert run(tmp_path, 'sweep', '--matrix', 'golden', '--Qgeo', '4', '--shapes', 'oval') == 2


def test_weights_check(tmp_path, capsys):
    assert run(tmp_path, 'weights-check', '--exhaustive', '--M', '1', '--N', '3') == 0
    assert capsys.readouterr().out.strip() == '5 tables, 0 failed'
    assert run(tmp_path, 'weights-check', '--M', '2', '--N', '2') == 0


def test_minima_from_basis(tmp_path, capsys):
    assert run(tmp_path, 'minima', '--basis', '1,0;1/2,1/2') == 0
    assert capsys.readouterr().out.split() == ['0.7071067812', '0.7071067812']


def test_minima_from_matrix(tmp_path):
    assert run(tmp_path, 'minima', '--matrix', 'sqrt(2),sqrt(3)') == 0
    frame = pd.read_csv(tmp_path / 'minima.csv')
    assert len(frame) == 3


def test_partition_dump(tmp_path, capsys):
    assert run(tmp_path, 'partition-dump', '--M', '2', '--eps', '1/100', '--T', '1') == 0
    assert capsys.readouterr().out.strip() == '5 cells'
    assert len(pd.read_csv(tmp_path / 'partition-dump.csv')) == 5


def test_phi_profile(tmp_path, capsys):
    assert run(tmp_path, 'phi-profile', '--matrix', 'golden', '--X', '1,10') == 0
    assert capsys.readouterr().out.split() == ['0.381966', '0.381966']


def test_ratio_bounds(tmp_path):
    code = run(tmp_path, 'ratio-bounds', '--matrix', 'sqrt(2)', '--eps', '1/8', '--T', '1',
               '--Q', '8')
    assert code == 0
    frame = pd.read_csv(tmp_path / 'ratio-bounds.csv')
    assert set(frame['phi_source']) == {'empirical'}


def test_unknown_suite(tmp_path):
    assert run(tmp_path, 'verify', '--suite', 'cluster') == 2


def test_replay_is_identical(tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    argv = ['count', '--matrix', 'sqrt(3)', '--eps', '1/2', '--T', '1', '--Q', '6']
    assert main(argv + ['--out', str(first)]) == 0
    echo = first / 'count.config.json'
    assert main(['count', '--config', str(echo), '--out', str(second)]) == 0
    assert (first / 'count.csv').read_bytes() == (second / 'count.csv').read_bytes()


def test_config_round_trip():
    cfg = parse_config(['sweep', '--matrix', 'golden', '--Qgeo', '4..64',
                        '--shapes', 'sym,skew'])
    assert cfg.shapes == ['sym', 'skew']
    assert RunConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"command": "sum", "colour": "blue"}')


def test_qgeo_grid():
    assert qgeo_grid('4..4096')[-1] == 4096
    assert qgeo_grid('3,5') == [3, 5]
    with pytest.raises(ConfigError):
        qgeo_grid('8..4')


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv('RECIPSUM_PRECISION', '256')
    cfg = parse_config(['phi-profile', '--matrix', 'golden', '--X', '2'])
    assert cfg.precision == 256
