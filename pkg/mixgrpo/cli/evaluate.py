# -*- coding: utf-8 -*-
# Copyright (C) the mixgrpo developers (2026)
#
# This file is part of mixgrpo.
#
# mixgrpo is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# mixgrpo is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with mixgrpo.  If not, see <http://www.gnu.org/licenses/>.

"""Evaluate checkpoints on held-out problems

Writes the format and answer rates of each policy, the requested metrics,
the pairwise contingency tables, and the decoupling of the first policy
(normally the reference) against each of the others.
"""

import logging
import os.path

from astropy.table import Table

from ..config import run_directory
from ..core import (contingency, contingency_table, decoupling, evaluate,
                    evaluate_metrics, report_table, write_table)
from ..errors import ConfigError
from ..io import (build_id, load_policy)
from ..metric import get_metric
from ..mixer import (LOGIT, EnsembleSpec, MixSpec, MixedPolicy)
from ..tasks import generate_problems

NAME = 'eval'
DEFAULT_METRICS = ['Format rate', 'Answer rate', 'Mean reward',
                   'Mean response length', 'Raw answer rate']

LOGGER = logging.getLogger(__name__)


def add_command_line_arguments(topparser, parents=[]):
    """Add the command-line arguments for this action
    """
    help, desc = __doc__.split('\n', 1)
    parser = topparser.add_parser(NAME, parents=parents,
                                  help=help, description=desc)
    parser._optionals.title = 'Optional arguments'
    arggroup = parser.add_argument_group('Evaluation options')
    arggroup.add_argument(
        '-p', '--policy', action='append', default=[], metavar='FILE',
        help='checkpoint to evaluate, can be given multiple times; '
             'default: the reference and the final trained policy')
    arggroup.add_argument(
        '--reference', metavar='FILE',
        help='reference checkpoint for mixtures (sets train.reference)')
    arggroup.add_argument(
        '-a', '--alpha', type=float,
        help='also evaluate each policy mixed with the reference at this '
             'weight')
    arggroup.add_argument(
        '--scheme', default=LOGIT,
        help='mixing scheme for --alpha, default: %(default)s')
    arggroup.add_argument(
        '--member', action='append', default=[], metavar='FILE:WEIGHT',
        help='member of a logit ensemble to evaluate, can be given '
             'multiple times')
    arggroup.add_argument(
        '-m', '--metric', action='append', dest='metrics', metavar='METRIC',
        help='metric to report, can be given multiple times')
    arggroup.add_argument(
        '-N', '--size', type=int,
        help='number of held-out problems (sets eval.heldout_size)')
    return parser


def _label(path):
    return os.path.splitext(os.path.basename(path))[0]


def _parse_member(item):
    try:
        path, weight = item.rsplit(':', 1)
        return path, float(weight)
    except ValueError:
        raise ConfigError("cannot parse ensemble member %r, expected "
                          "FILE:WEIGHT" % item)


def _default_policies(outdir):
    paths = [os.path.join(outdir, 'reference.npz'),
             os.path.join(outdir, 'checkpoints', 'final.npz')]
    return [p for p in paths if os.path.isfile(p)]


def run(args, config):
    """Execute the evaluation
    """
    if args.size is not None:
        config.set_override('eval.heldout_size=%d' % args.size)
    if args.reference:
        config.set_override('train.reference=%s' % args.reference)
    outdir = run_directory(config, args.output_directory)
    paths = args.policy or ([] if args.member else _default_policies(outdir))
    if not paths and not args.member:
        raise ConfigError("no checkpoints to evaluate in %s" % outdir)
    for path in paths:
        if not os.path.isfile(path):
            raise ConfigError("no checkpoint at %s" % path)

    config.write_resolved(os.path.join(outdir, 'config-%s.ini' % NAME),
                          build=build_id(), seed=config.typed('run', 'seed'))

    problems = generate_problems(config.typed('run', 'seed'),
                                 config.typed('eval', 'heldout_size'),
                                 difficulty=config.difficulty(),
                                 split='test')
    max_len = config.typed('eval', 'max_len')
    nproc = config.typed('run', 'nproc')

    scorers = [(_label(path), load_policy(path)) for path in paths]
    if args.alpha is not None:
        from .train import checkpoint_path
        reference = load_policy(checkpoint_path(config, 'reference', outdir))
        for label, policy in list(scorers):
            mix = MixSpec(args.scheme, args.alpha, reference)
            scorers.append(('%s+%s-%.2f' % (label, args.scheme, args.alpha),
                            MixedPolicy(policy, mix)))
    if args.member:
        members = []
        for item in args.member:
            path, weight = _parse_member(item)
            if not os.path.isfile(path):
                raise ConfigError("no checkpoint at %s" % path)
            members.append((load_policy(path), weight))
        scorers.append(('ensemble', EnsembleSpec(members)))

    reports = []
    for label, scorer in scorers:
        report = evaluate(scorer, problems, max_len=max_len, label=label,
                          nproc=nproc)
        LOGGER.info("%s: format %.3f, answer %.3f", label,
                    report.format_rate, report.answer_rate)
        reports.append(report)

    # write tables
    write_table(report_table(reports), os.path.join(outdir,
                                                    'eval-reports.csv'))
    metrics = [get_metric(m) for m in (args.metrics or DEFAULT_METRICS)]
    metrics.extend(config.metrics())
    write_table(metric_table(reports, metrics),
                os.path.join(outdir, 'eval-metrics.csv'))
    if len(reports) > 1:
        pairs = [(a.label, b.label, contingency(a, b))
                 for i, a in enumerate(reports) for b in reports[i + 1:]]
        write_table(contingency_table(pairs),
                    os.path.join(outdir, 'eval-contingency.csv'))
        rows = []
        for other in reports[1:]:
            row = decoupling(reports[0], other)
            row['final'] = other.label
            rows.append(row)
        write_table(rows, os.path.join(outdir, 'eval-decoupling.csv'))
    LOGGER.info("Evaluation tables written to %s", outdir)


def metric_table(reports, metrics):
    """Tabulate single-report metrics, one row per report
    """
    columns = [[r.label or '' for r in reports]]
    names = ['label']
    units = [None]
    for metric in metrics:
        if metric.needs_pair:
            continue
        values = [evaluate_metrics(r, [metric])[metric.name]
                  for r in reports]
        columns.append([v.value for v in values])
        names.append(metric.name)
        units.append(metric.unit)
    table = Table(columns, names=names)
    for name, unit in zip(names, units):
        if unit is not None:
            table[name].unit = unit
    return table
