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

"""Core evaluation methods for mixgrpo
"""

import logging
from collections import (OrderedDict, namedtuple)
from concurrent.futures import ProcessPoolExecutor

import numpy

from astropy.table import Table

from .adaptive import greedy_decode_batch
from .errors import (DomainError, InputError)
from .metric import Metric
from .metric.registry import get_metric
from .mixer import (LOGIT, PROB, MixSpec, MixedPolicy, check_alpha,
                    mix_logits)
from . import ndgrad
from .tasks import (answer_ignoring_format, verify)

__all__ = ['EvalReport', 'ContingencyTable', 'MechanismProbe', 'evaluate',
           'evaluate_metrics', 'contingency', 'alpha_sweep',
           'mechanism_probe', 'decoupling', 'report_table',
           'contingency_table', 'write_table', 'ALPHA_GRID']

LOGGER = logging.getLogger(__name__)

ALPHA_GRID = tuple(numpy.round(numpy.linspace(0., 1., 11), 1))

# prompts decoded together; fixed so that the result does not depend on
# the number of worker processes
CHUNK_SIZE = 64


class EvalReport(object):
    """The greedy decodes of one policy on a problem set, with verdicts

    Parameters
    ----------
    label : `str`
        name of the evaluated policy
    problems : `list` of `~mixgrpo.tasks.Problem`
        the problems, in order
    responses : `list` of `tuple`
        the decoded response for each problem
    verdicts : `list` of `~mixgrpo.tasks.Verdict`, optional
        the verdict for each response; computed if not given
    """
    def __init__(self, label, problems, responses, verdicts=None):
        self.label = label
        self.problems = list(problems)
        self.responses = [tuple(r) for r in responses]
        if verdicts is None:
            verdicts = [verify(p, r) for p, r in
                        zip(self.problems, self.responses)]
        self.verdicts = list(verdicts)
        if self.problems and len(self.problems) != len(self.verdicts):
            raise InputError("one verdict is needed per problem")
        assert self.answer_rate <= self.format_rate

    @classmethod
    def from_verdicts(cls, verdicts, label=None):
        """A report holding only verdicts
        """
        return cls(label, [], [], verdicts=verdicts)

    def __len__(self):
        return len(self.verdicts)

    @property
    def n(self):
        return len(self.verdicts)

    @property
    def format_ok(self):
        return numpy.array([v.format_ok for v in self.verdicts], dtype=bool)

    @property
    def answer_ok(self):
        return numpy.array([v.answer_ok for v in self.verdicts], dtype=bool)

    @property
    def format_rate(self):
        """Fraction of format-correct responses

        :type: `float`
        """
        return float(self.format_ok.mean()) if self.n else 0.

    @property
    def answer_rate(self):
        """Fraction of answer-correct responses

        :type: `float`
        """
        return float(self.answer_ok.mean()) if self.n else 0.

    @property
    def raw_answer_ok(self):
        """Answer correctness with the template check disabled
        """
        return numpy.array([answer_ignoring_format(p, r) for p, r in
                            zip(self.problems, self.responses)], dtype=bool)

    @property
    def raw_answer_rate(self):
        """Fraction of responses whose last digit run is the gold answer,
        whatever the format

        :type: `float`
        """
        if not self.responses:
            return 0.
        return float(self.raw_answer_ok.mean())

    def __repr__(self):
        return '<EvalReport({0!r}, n={1}, format={2:.3f}, answer={3:.3f})>'\
            .format(self.label, self.n, self.format_rate, self.answer_rate)


class ContingencyTable(namedtuple('ContingencyTable', (
        'both_correct', 'a_only', 'b_only', 'both_wrong', 'n'))):
    """Paired answer correctness of two policies
    """
    __slots__ = ()

    @property
    def disagreement(self):
        """Fraction of problems where exactly one policy is correct
        """
        return (self.a_only + self.b_only) / float(self.n) if self.n else 0.


MechanismProbe = namedtuple('MechanismProbe', ('ref', 'train', 'mix'))


# -- evaluation ---------------------------------------------------------------

def _decode_chunk(args):
    scorer, prompts, max_len = args
    return greedy_decode_batch(scorer, prompts, max_len)


def evaluate(scorer, problems, max_len=6, label=None, nproc=1):
    """Greedy-decode and verify every problem

    Parameters
    ----------
    scorer : `~mixgrpo.model.Policy`, `~mixgrpo.mixer.MixedPolicy`, ...
        the policy or mixture to evaluate
    problems : `list` of `~mixgrpo.tasks.Problem`
        the problem set
    max_len : `int`, optional
        cap on the number of response tokens
    label : `str`, optional
        a name for the report
    nproc : `int`, optional
        number of worker processes

    Returns
    -------
    report : `EvalReport`
    """
    problems = list(problems)
    if not problems:
        raise InputError("cannot evaluate on an empty problem set")
    prompts = [p.prompt for p in problems]
    chunks = [(scorer, prompts[i:i + CHUNK_SIZE], max_len)
              for i in range(0, len(prompts), CHUNK_SIZE)]
    if nproc > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=nproc) as pool:
            parts = list(pool.map(_decode_chunk, chunks))
    else:
        parts = [_decode_chunk(chunk) for chunk in chunks]
    responses = [r for part in parts for r in part]
    report = EvalReport(label, problems, responses)
    LOGGER.debug("Evaluated %s on %d problems: format %.3f, answer %.3f",
                 label, report.n, report.format_rate, report.answer_rate)
    return report


def evaluate_metrics(report, metrics=('Format rate', 'Answer rate'),
                     other=None):
    """Apply named metrics to a report

    Parameters
    ----------
    report : `EvalReport`
        the report to measure
    metrics : `list`, optional
        `~mixgrpo.metric.Metric` objects or registered metric names
    other : `EvalReport`, optional
        the second report, for pairwise metrics

    Returns
    -------
    results : `OrderedDict`
        the `~astropy.units.Quantity` of each metric, keyed by name
    """
    out = OrderedDict()
    for metric in metrics:
        if isinstance(metric, Metric):
            _metric = metric
        else:
            _metric = get_metric(metric)
        value = _metric.measure(report, other)
        if value is not None:
            out[_metric.name] = value
    return out


def _same_problems(report_a, report_b):
    if report_a.n != report_b.n:
        return False
    return all(a.prompt == b.prompt and a.gold_answer == b.gold_answer
               for a, b in zip(report_a.problems, report_b.problems))


def contingency(report_a, report_b):
    """Count paired answer correctness of two reports

    Raises
    ------
    mixgrpo.errors.InputError
        if the reports are not over the same problems in the same order
    """
    if not _same_problems(report_a, report_b):
        raise InputError("reports %r and %r cover different problems"
                         % (report_a.label, report_b.label))
    a = report_a.answer_ok
    b = report_b.answer_ok
    return ContingencyTable(int((a & b).sum()), int((a & ~b).sum()),
                            int((~a & b).sum()), int((~a & ~b).sum()),
                            report_a.n)


def alpha_sweep(train_policy, reference, problems, schemes=(LOGIT, PROB),
                alphas=ALPHA_GRID, max_len=6, nproc=1):
    """Evaluate the mixture over a grid of weights and schemes

    Returns
    -------
    table : `~astropy.table.Table`
        with columns ``scheme``, ``alpha``, ``format_rate``,
        ``answer_rate``, one row per (scheme, alpha)
    """
    alphas = [check_alpha(a) for a in alphas]
    rows = []
    for scheme in schemes:
        for alpha in alphas:
            mix = MixSpec(scheme, alpha, reference)
            report = evaluate(MixedPolicy(train_policy, mix), problems,
                              max_len=max_len, nproc=nproc,
                              label='%s-%.2f' % (scheme, alpha))
            rows.append((scheme, alpha, report.format_rate,
                         report.answer_rate))
            LOGGER.info("%s alpha=%.2f: format %.3f, answer %.3f", scheme,
                        alpha, report.format_rate, report.answer_rate)
    return Table(rows=rows, names=('scheme', 'alpha', 'format_rate',
                                   'answer_rate'),
                 dtype=('U8', float, float, float))


def mechanism_probe(pi_ref, pi_train, alpha):
    """The most probable token under each expert and under their
    logit mixture

    Parameters
    ----------
    pi_ref, pi_train : `array_like`
        strictly positive next-token distributions
    alpha : `float`
        weight of the reference

    Returns
    -------
    probe : `MechanismProbe`
        the argmax token ids ``(ref, train, mix)``, lowest id on ties
    """
    pi_ref = numpy.asarray(pi_ref, dtype=float)
    pi_train = numpy.asarray(pi_train, dtype=float)
    if pi_ref.shape != pi_train.shape or pi_ref.ndim != 1:
        raise InputError("distributions must be vectors of equal length")
    if (pi_ref <= 0).any() or (pi_train <= 0).any():
        raise DomainError("distributions must be strictly positive")
    mixed = ndgrad.softmax(mix_logits(numpy.log(pi_train), numpy.log(pi_ref),
                                      alpha)).data
    return MechanismProbe(int(numpy.argmax(pi_ref)),
                          int(numpy.argmax(pi_train)),
                          int(numpy.argmax(mixed)))


def decoupling(report_ref, report_final):
    """Summarise how a final policy and the reference split the skills

    Returns
    -------
    row : `OrderedDict`
        both policies' rates, the contingency cells, the format gap
        (reference minus final), the answer gap (final minus reference),
        and the disagreement count and fraction
    """
    table = contingency(report_ref, report_final)
    return OrderedDict([
        ('ref_format_rate', report_ref.format_rate),
        ('ref_answer_rate', report_ref.answer_rate),
        ('final_format_rate', report_final.format_rate),
        ('final_answer_rate', report_final.answer_rate),
        ('both_correct', table.both_correct),
        ('ref_only', table.a_only),
        ('final_only', table.b_only),
        ('both_wrong', table.both_wrong),
        ('format_gap', report_ref.format_rate - report_final.format_rate),
        ('answer_gap', report_final.answer_rate - report_ref.answer_rate),
        ('disagreement', table.a_only + table.b_only),
        ('disagreement_fraction', table.disagreement),
        ('n', table.n),
    ])


# -- tables -------------------------------------------------------------------

def report_table(reports):
    """Tabulate the rates of several reports
    """
    return Table(rows=[(r.label or '', r.n, r.format_rate, r.answer_rate)
                       for r in reports],
                 names=('label', 'n', 'format_rate', 'answer_rate'),
                 dtype=('U64', int, float, float))


def contingency_table(pairs):
    """Tabulate `ContingencyTable` objects

    Parameters
    ----------
    pairs : `list` of `tuple`
        ``(label_a, label_b, table)`` triples
    """
    return Table(rows=[(a, b) + tuple(t) + (t.disagreement,)
                       for a, b, t in pairs],
                 names=('a', 'b') + ContingencyTable._fields +
                       ('disagreement',),
                 dtype=('U64', 'U64', int, int, int, int, int, float))


def write_table(table, path):
    """Write a table (or a list of row dicts) as comma-separated values
    """
    if not isinstance(table, Table):
        table = Table(rows=[list(row.values()) for row in table],
                      names=list(table[0].keys()))
    table.write(path, format='ascii.csv', overwrite=True)
    LOGGER.debug("Table written to %s", path)
    return path
