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

"""Registry for mixgrpo metrics

Metrics are registered under a case-insensitive name so that the command
line and configuration files can request them
"""

import re

_METRICS = {}

re_strip = re.compile(r'[\'\"]')


def _key(name):
    return re_strip.sub('', name).strip().lower()


def register_metric(metric, name=None, force=False):
    """Register a `Metric`, under ``name`` or its own name

    Returns
    -------
    metric : `Metric`
        the input, for chaining

    Raises
    ------
    ValueError
        if the name is taken and ``force`` is not `True`
    """
    key = _key(metric.name if name is None else name)
    if key in _METRICS and not force:
        raise ValueError("a metric is already registered as %r" % key)
    _METRICS[key] = metric
    return metric


def get_metric(name):
    """Look up a registered `Metric`

    Raises
    ------
    ValueError
        if nothing is registered under ``name``
    """
    try:
        return _METRICS[_key(name)]
    except KeyError:
        raise ValueError("no metric registered as %r, choose one of: %s"
                         % (name, ', '.join(sorted(_METRICS))))


def get_all_metrics():
    """All registered metrics, in registration order
    """
    return list(_METRICS.values())
