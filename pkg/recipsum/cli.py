"""
Command line interface.

Every run is described by a :class:`RunConfig`. The config is validated
before any computation and echoed as JSON next to the outputs, and
``--config FILE`` replays such an echo. Tables go to ``<command>.csv`` with
a ``schema_version`` column, records to ``<command>.jsonl``.

Exit codes: 0 success, 2 configuration or input error, 3 budget exceeded,
4 invariant violation or failed verification.

>>> cfg = parse_config(['count', '--matrix', 'sqrt(2)', '--eps', '0.3', '--T', '0.5', '--Q', '5'])
>>> cfg.command, cfg.Q
('count', ['5'])
>>> RunConfig.from_json(cfg.to_json()) == cfg
True
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import pandas as pd

from . import __version__
from .constants import DEFAULT_BUDGET, MIN_PRECISION, SCHEMA_VERSION, working_precision
from .counting import (CountInstance, certainly_empty, count_M_direct, count_via_lattice,
                       q_chunks, ratio_bounds)
from .errors import BudgetExceeded, ConfigError, InvariantViolation, RecipsumError
from .lattice import (BoxSpec, LatticeBasis, SystemMatrix, build_unipotent_lattice,
                      minkowski_check, successive_minima)
from .normal import normalize
from .numerics import parse_scalar
from .partition import HyperbolicRegion, build_partition
from .sums import (SHAPES, dyadic_terms, empirical_phi, fit_constants, phi_profile,
                   shape_box, sum_report, sweep_row)
from .suite import results_frame, run_suite
from .weights import WeightTable, exhaustive_check, verify_weight_lemma

log = logging.getLogger(__name__)

COMMANDS = ('sum', 'sweep', 'count', 'minima', 'partition-dump', 'weights-check',
            'phi-profile', 'ratio-bounds', 'verify')

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


@dataclass
class RunConfig(object):
    """Everything a run depends on."""

    command: str
    matrix: str = None
    basis: str = None
    eps: str = None
    T: str = None
    Q: list = None
    Qgeo: str = None
    shapes: list = field(default_factory=lambda: ['sym'])
    X: list = None
    phi: str = None
    M: int = None
    N: int = None
    exhaustive: bool = False
    suite: str = 'desk'
    seed: int = 0
    threads: int = 1
    precision: int = None
    budget: int = DEFAULT_BUDGET
    out: str = '.'
    emit_gnuplot: bool = False
    assume_irrational: bool = False

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError("unknown config keys: %s" % ', '.join(unknown))
        return cls(**data)

    def validate(self):
        """
        Raise :class:`ConfigError` for anything the command cannot run with.

        >>> RunConfig('sum', matrix='sqrt(2)').validate()
        Traceback (most recent call last):
            ...
        recipsum.errors.ConfigError: sum needs --Q
        """
        if self.command not in COMMANDS:
            raise ConfigError("unknown command %r" % self.command)
        needs = {
            'sum': ('matrix', 'Q'),
            'sweep': ('matrix', 'Qgeo'),
            'count': ('matrix', 'eps', 'T', 'Q'),
            'partition-dump': ('M', 'eps', 'T'),
            'weights-check': ('M', 'N'),
            'phi-profile': ('matrix', 'X'),
            'ratio-bounds': ('matrix', 'eps', 'T', 'Q'),
        }
        for name in needs.get(self.command, ()):
            if getattr(self, name) in (None, []):
                raise ConfigError("%s needs --%s" % (self.command, name))
        if self.command == 'minima' and not (self.matrix or self.basis):
            raise ConfigError("minima needs --matrix or --basis")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1, got %d" % self.threads)
        if self.budget < 1:
            raise ConfigError("--budget must be positive, got %d" % self.budget)
        if self.precision is not None and self.precision < MIN_PRECISION:
            raise ConfigError("--precision must be at least %d bits, got %d"
                              % (MIN_PRECISION, self.precision))
        for shape in self.shapes:
            if shape not in SHAPES:
                raise ConfigError("unknown box shape %r" % shape)
        if self.Qgeo is not None:
            qgeo_grid(self.Qgeo)
        return self

    def system_matrix(self):
        return SystemMatrix.parse(self.matrix, prec=self.precision,
                                  assume_irrational=self.assume_irrational)

    def box(self):
        return BoxSpec(self.Q, prec=self.precision)

    def instance(self):
        return CountInstance(self.system_matrix(), self.eps, self.T, self.box())

    def phi_value(self, L, box):
        """phi from --phi, else the empirical minimum at Q_geo."""
        if self.phi is not None:
            return parse_scalar(self.phi), 'assumed'
        return empirical_phi(L, box, self.budget), 'empirical'


def qgeo_grid(text):
    """
    Heights from ``a..b`` (doubling from a up to b) or a comma list.

    >>> qgeo_grid('4..64'), qgeo_grid('3,5')
    ([4, 8, 16, 32, 64], [3, 5])
    """
    try:
        if '..' in text:
            lo, hi = (int(v) for v in text.split('..'))
            if lo < 1 or hi < lo:
                raise ConfigError("bad height range %r" % text)
            out = []
            while lo <= hi:
                out.append(lo)
                lo *= 2
            return out
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError("bad height grid %r" % text)


def _csv_list(text):
    return [v.strip() for v in text.split(',') if v.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="replay the JSON echo of an earlier run")
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--threads', type=int, default=1)
    common.add_argument('--precision', type=int, default=None,
                        help="working precision in bits (default from RECIPSUM_PRECISION)")
    common.add_argument('--budget', type=int, default=DEFAULT_BUDGET)
    common.add_argument('--out', default='.', help="output directory")
    common.add_argument('--emit-gnuplot', action='store_true')
    common.add_argument('--assume-irrational', action='store_true')
    common.add_argument('-v', '--verbose', action='count', default=0)
    common.add_argument('-q', '--quiet', action='store_true')

    parser = argparse.ArgumentParser(
        prog='recipsum',
        description="Sums of reciprocals of fractional parts and the lattice counts behind them.")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[common], help=help)

    p = add('sum', "S_L(Q) with dyadic bound and envelope")
    p.add_argument('--matrix')
    p.add_argument('--Q', type=_csv_list)
    p.add_argument('--phi')

    p = add('sweep', "sums over a grid of heights and box shapes")
    p.add_argument('--matrix')
    p.add_argument('--Qgeo')
    p.add_argument('--shapes', type=_csv_list, default=['sym'])

    p = add('count', "size of M(L, eps, T, Q), directly and on the lattice")
    for name in ('--matrix', '--eps', '--T', '--phi'):
        p.add_argument(name)
    p.add_argument('--Q', type=_csv_list)

    p = add('minima', "successive minima and the normalized basis")
    p.add_argument('--matrix')
    p.add_argument('--basis', help="lattice basis, vectors separated by ';'")

    p = add('partition-dump', "cells of the partition of H+")
    p.add_argument('--M', type=int)
    p.add_argument('--eps')
    p.add_argument('--T')

    p = add('weights-check', "weight tables and their identities")
    p.add_argument('--M', type=int)
    p.add_argument('--N', type=int)
    p.add_argument('--exhaustive', action='store_true')

    p = add('phi-profile', "running minimum of prod max(1,|q_j|) prod ||L_i q||")
    p.add_argument('--matrix')
    p.add_argument('--X', type=_csv_list)

    p = add('ratio-bounds', "minima ratios of the transformed lattices per cell")
    for name in ('--matrix', '--eps', '--T', '--phi'):
        p.add_argument(name)
    p.add_argument('--Q', type=_csv_list)

    p = add('verify', "run a suite of certified checks")
    p.add_argument('--suite', default='desk')
    return parser


def config_from_args(args):
    """A validated RunConfig from parsed arguments or the file they name."""
    if args.config:
        try:
            with open(args.config, encoding='utf-8') as fh:
                cfg = RunConfig.from_json(fh.read())
        except (OSError, ValueError, TypeError) as err:
            raise ConfigError("cannot read config %s: %s" % (args.config, err))
        if args.out != '.':
            cfg.out = args.out
        return cfg.validate()
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    if cfg.precision is None:
        cfg.precision = working_precision()
    return cfg.validate()


def parse_config(argv):
    return config_from_args(build_parser().parse_args(argv))


def configure_logging(verbose=0, quiet=False):
    if quiet:
        level = logging.ERROR
    elif verbose > 1:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


class Output(object):
    """Files of one run, all under ``cfg.out`` and named after the command."""

    def __init__(self, cfg):
        self.cfg = cfg
        os.makedirs(cfg.out, exist_ok=True)
        self.paths = []

    def path(self, suffix):
        return os.path.join(self.cfg.out, self.cfg.command + suffix)

    def echo(self):
        self._write('.config.json', self.cfg.to_json() + '\n')

    def table(self, frame, x=None, y=None):
        frame = frame.copy()
        frame.insert(0, 'schema_version', SCHEMA_VERSION)
        target = self.path('.csv')
        frame.to_csv(target, index=False)
        self.paths.append(target)
        if self.cfg.emit_gnuplot and x is not None and y:
            self.gnuplot(list(frame.columns), x, y)

    def records(self, records):
        lines = [json.dumps(r, sort_keys=True, default=_plain) for r in records]
        self._write('.jsonl', '\n'.join(lines) + '\n')

    def gnuplot(self, columns, x, ys):
        data = os.path.basename(self.path('.csv'))
        plots = ["'%s' using %d:%d with linespoints"
                 % (data, columns.index(x) + 1, columns.index(y) + 1)
                 for y in ys if y in columns]
        lines = [
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set logscale xy",
            "set xlabel '%s'" % x,
            'plot ' + ', \\\n     '.join(plots),
        ]
        self._write('.gp', '\n'.join(lines) + '\n')

    def _write(self, suffix, text):
        target = self.path(suffix)
        with open(target, 'w', encoding='utf-8') as fh:
            fh.write(text)
        self.paths.append(target)


def cmd_sum(cfg, out):
    L = cfg.system_matrix()
    box = cfg.box()
    phi = parse_scalar(cfg.phi) if cfg.phi is not None else None
    report = sum_report(L, box, phi, cfg.budget)
    out.table(pd.DataFrame([report.row()]), x='Qgeo', y=['S', 'lower', 'upper', 'dyadic'])
    terms = dyadic_terms(L, box, report.phi, cfg.budget)
    out.records([report.to_record()] + terms.to_dict('records'))
    print('S = %s' % report.value)
    return EXIT_OK


def _sweep_point(job):
    matrix, Q, prec, budget = job
    return sweep_row(SystemMatrix.parse(matrix, prec=prec), Q, None, budget)


def cmd_sweep(cfg, out):
    L = cfg.system_matrix()
    jobs = []
    shapes = []
    for X in qgeo_grid(cfg.Qgeo):
        for shape in cfg.shapes:
            jobs.append((cfg.matrix, shape_box(X, L.N, shape), cfg.precision, cfg.budget))
            shapes.append(shape)
    if cfg.threads > 1:
        # map keeps the job order, so the table does not depend on scheduling
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]
    for row, shape in zip(rows, shapes):
        row['shape'] = shape
        log.info("sweep point Qgeo = %g (%s): S = %.6g", row['Qgeo'], shape, row['S'])
    frame = pd.DataFrame(rows)
    out.table(frame, x='Qgeo', y=['S', 'lower', 'upper', 'dyadic'])
    summary = fit_constants(frame)
    summary.update({'points': len(frame), 'matrix': cfg.matrix})
    out.records([summary])
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _count_chunk(job):
    inst, budget, q1_range = job
    return count_M_direct(inst, budget, q1_range)


def cmd_count(cfg, out):
    inst = cfg.instance()
    if cfg.threads > 1:
        jobs = [(inst, cfg.budget, r) for r in q_chunks(inst.Q, cfg.threads)]
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            direct = sum(pool.map(_count_chunk, jobs))
    else:
        direct = count_M_direct(inst, cfg.budget)
    via_lattice = count_via_lattice(inst, cfg.budget)
    if direct != via_lattice:
        raise InvariantViolation("direct count %d differs from lattice count %d"
                                 % (direct, via_lattice))
    record = dict(inst.to_record(), count=direct)
    if cfg.phi is not None:
        record['certainly_empty'] = certainly_empty(inst, parse_scalar(cfg.phi))
    out.table(pd.DataFrame([{'count': direct, 'eps': str(inst.eps), 'T': str(inst.T),
                             'Q': str(inst.Q)}]))
    out.records([record])
    print(direct)
    return EXIT_OK


def parse_basis(text, prec=None):
    """
    Lattice basis from text, vectors separated by ';' and coordinates by ','.

    >>> parse_basis('1,0;1/2,1/2').det
    ExactQuadratic(1, 0, 2, 1)
    """
    vectors = [[parse_scalar(e, decimals='big', prec=prec) for e in row.split(',')]
               for row in text.split(';') if row.strip()]
    return LatticeBasis(vectors)


def cmd_minima(cfg, out):
    if cfg.basis:
        basis = parse_basis(cfg.basis, cfg.precision)
        M = 0
    else:
        L = cfg.system_matrix()
        basis = build_unipotent_lattice(L)
        M = L.M
    report = successive_minima(basis)
    ratio = minkowski_check(report, basis.det, cfg.precision)
    nb, ladder = normalize(basis, report, M)
    frame = ladder.to_frame()
    frame.insert(1, 'lambda', [float(x) for x in report.lambdas])
    out.table(frame)
    out.records([dict(report.to_record(), minkowski_ratio=float(ratio),
                      basis=nb.to_record(), case=ladder.case, s0=ladder.s0)])
    print(' '.join('%.10g' % float(x) for x in report.lambdas))
    return EXIT_OK


def cmd_partition_dump(cfg, out):
    part = build_partition(HyperbolicRegion(cfg.M, cfg.eps, cfg.T))
    out.table(part.to_frame())
    summary = {'cells': len(part), 'K': part.K, 'c': str(part.c), 'kappa': part.kappa,
               'C': part.C}
    out.records([cell.to_record() for cell in part.cells] + [summary])
    print('%d cells' % len(part))
    return EXIT_OK


def cmd_weights_check(cfg, out):
    if cfg.exhaustive:
        frame = exhaustive_check(cfg.M, cfg.N)
        records = frame.to_dict('records')
    else:
        # the all-ones support matrix only
        ones = [[1] * cfg.N for _ in range(cfg.M + cfg.N - 1)]
        report = verify_weight_lemma(WeightTable(ones, cfg.M))
        records = [report.to_record()]
        frame = pd.DataFrame([{'k': ' '.join(records[0]['k']), 'ok': report.ok,
                               'failures': ' '.join(report.failures())}])
    out.table(frame)
    out.records(records)
    failed = int((~frame['ok'].astype(bool)).sum())
    print('%d tables, %d failed' % (len(frame), failed))
    if failed:
        raise InvariantViolation("%d weight tables failed" % failed)
    return EXIT_OK


def cmd_phi_profile(cfg, out):
    profile = phi_profile(cfg.system_matrix(), cfg.X, cfg.budget)
    frame = profile.to_frame()
    out.table(frame, x='X', y=['phi'])
    out.records(frame.to_dict('records'))
    print(' '.join('%.6f' % float(v) for v in profile.values))
    return EXIT_OK


def cmd_ratio_bounds(cfg, out):
    inst = cfg.instance()
    phi, source = cfg.phi_value(inst.L, inst.Q)
    report = ratio_bounds(inst, phi=phi, phi_source=source)
    out.table(report.to_frame())
    out.records([{'fitted': report.fitted, 'phi': float(phi), 'phi_source': source,
                  'cases': [[list(k), case, s0] for k, case, s0 in report.cases]}])
    print('fitted %.6g' % report.fitted)
    return EXIT_OK


def cmd_verify(cfg, out):
    results = run_suite(cfg.suite, cfg.seed)
    out.table(results_frame(results))
    out.records([r.to_record() for r in results])
    for r in results:
        print('%-10s %s' % (r.name, 'ok' if r.passed else 'FAILED'))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


HANDLERS = {
    'sum': cmd_sum,
    'sweep': cmd_sweep,
    'count': cmd_count,
    'minima': cmd_minima,
    'partition-dump': cmd_partition_dump,
    'weights-check': cmd_weights_check,
    'phi-profile': cmd_phi_profile,
    'ratio-bounds': cmd_ratio_bounds,
    'verify': cmd_verify,
}


def run(cfg):
    """Run a validated config and return the exit code."""
    out = Output(cfg)
    out.echo()
    return HANDLERS[cfg.command](cfg, out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return run(config_from_args(args))
    except BudgetExceeded as err:
        log.error("%s", err)
        return EXIT_BUDGET
    except InvariantViolation as err:
        log.error("%s", err)
        return EXIT_INVARIANT
    except (RecipsumError, ValueError, ZeroDivisionError) as err:
        log.error("%s", err)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
