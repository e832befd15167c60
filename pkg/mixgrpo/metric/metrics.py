# coding=utf-8
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

"""This module defines a number of standard `metrics <Metric>`.
"""

import decorator

import numpy

from astropy.units import Unit

from ..errors import InputError
from .core import Metric
from .registry import register_metric


# -----------------------------------------------------------------------------
# Utilities

@decorator.decorator
def _use_report(f, report, *args, **kwargs):
    """Decorate a method to convert an incoming list of verdicts into an
    `~mixgrpo.core.EvalReport`
    """
    from ..core import EvalReport
    if not isinstance(report, EvalReport):
        report = EvalReport.from_verdicts(report)
    return f(report, *args, **kwargs)


# -----------------------------------------------------------------------------
# Standard metrics

@_use_report
def format_rate(report):
    """The percentage of format-correct responses

    Parameters
    ----------
    report : `~mixgrpo.core.EvalReport`, `list` of `~mixgrpo.tasks.Verdict`
        the evaluation to measure

    Returns
    -------
    %fmt : `float`
    """
    return report.format_rate * 100


register_metric(Metric(format_rate, 'Format rate', unit=Unit('%')))


@_use_report
def answer_rate(report):
    """The percentage of answer-correct responses

    An answer only counts when its format is also correct.
    """
    return report.answer_rate * 100


register_metric(Metric(answer_rate, 'Answer rate', unit=Unit('%')))


@_use_report
def mean_reward(report):
    """The mean verifier reward"""
    if not report.n:
        return 0.
    return float(numpy.mean([v.reward for v in report.verdicts]))


register_metric(Metric(mean_reward, 'Mean reward'))


@_use_report
def mean_response_length(report):
    """The mean number of tokens per decoded response, including ``<eos>``
    """
    if not report.responses:
        raise InputError("report %r holds no responses" % report.label)
    return float(numpy.mean([len(r) for r in report.responses]))


register_metric(Metric(mean_response_length, 'Mean response length'))


@_use_report
def disagreement(report, other):
    """The percentage of problems where exactly one of two policies gives
    the correct answer

    Parameters
    ----------
    report : `~mixgrpo.core.EvalReport`
        the first evaluation
    other : `~mixgrpo.core.EvalReport`
        the second evaluation, over the same problems

    Returns
    -------
    %dis : `float`
    """
    from ..core import contingency
    return contingency(report, other).disagreement * 100


register_metric(Metric(disagreement, 'Disagreement', unit=Unit('%')))


@_use_report
def raw_answer_rate(report):
    """The percentage of responses ending in the correct digits, with the
    answer template not required
    """
    if not report.responses:
        raise InputError("report %r holds no responses" % report.label)
    return report.raw_answer_rate * 100


register_metric(Metric(raw_answer_rate, 'Raw answer rate', unit=Unit('%')))
