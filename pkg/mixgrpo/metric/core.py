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

"""The `Metric` wrapper for figures of merit
"""

import builtins
import inspect
import re
from importlib import import_module

from astropy.units import (Quantity, Unit, dimensionless_unscaled)

re_quote = re.compile(r'^[\s\"\']+|[\s\"\']+$')


def _count_required(func):
    """Number of positional arguments ``func`` needs
    """
    try:
        params = inspect.signature(func).parameters.values()
    except (TypeError, ValueError):  # some builtins have no signature
        return 1
    return sum(1 for p in params if p.default is p.empty and
               p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD))


def _import_method(path):
    """Resolve ``package.module.function`` (or a builtin name)
    """
    try:
        modulename, methodname = path.rsplit('.', 1)
    except ValueError:
        return getattr(builtins, path)
    return getattr(import_module(modulename), methodname)


class Metric(object):
    """A figure of merit for one evaluated policy, or for a pair

    Parameters
    ----------
    method : `callable`
        takes one `~mixgrpo.core.EvalReport`, or two for pairwise
        metrics, and returns a number
    name : `str`, optional
        short display name, default: the method's ``__name__``
    description : `str`, optional
        default: the method docstring
    unit : `str`, `~astropy.units.UnitBase`, optional
        unit of the returned value, default: dimensionless
    needs_pair : `bool`, optional
        whether ``method`` compares two reports; inferred from its
        signature if not given

    Raises
    ------
    TypeError
        if ``method`` is not callable, or no name can be found
    """
    __slots__ = ('method', 'name', 'description', 'unit', 'needs_pair')

    def __init__(self, method, name=None, description=None, unit=None,
                 needs_pair=None):
        if not callable(method):
            raise TypeError("a Metric needs a callable method, got %r"
                            % (method,))
        if name is None and getattr(method, '__name__', '<lambda>') \
                != '<lambda>':
            name = method.__name__
        if not isinstance(name, str):
            raise TypeError("a Metric needs a str name, got %r" % (name,))
        if description is None:
            description = method.__doc__ or ''
        self.method = method
        self.name = name
        self.description = str(description).strip()
        self.unit = dimensionless_unscaled if unit is None else Unit(unit)
        if needs_pair is None:
            needs_pair = _count_required(method) > 1
        self.needs_pair = bool(needs_pair)

    def __repr__(self):
        summary = self.description.split('\n', 1)[0]
        return '<Metric({0!r}, {1!r}, unit={2!r})>'.format(
            self.name, summary, self.unit.to_string())

    def __str__(self):
        return self.name

    def __call__(self, *reports):
        """Measure the given report(s)

        Returns
        -------
        value : `~astropy.units.Quantity`
        """
        return Quantity(self.method(*reports), unit=self.unit)

    def measure(self, report, other=None):
        """Measure ``report``, paired with ``other`` if this metric
        compares two reports

        Returns `None` for a pairwise metric when ``other`` is not given.
        """
        if not self.needs_pair:
            return self(report)
        if other is None:
            return None
        return self(report, other)

    @classmethod
    def from_ini(cls, config, section):
        """Define a new `Metric` from a `~configparser.ConfigParser`
        section

        ``method`` is required; ``name`` defaults to the section name, and
        ``description`` and ``unit`` are optional. Values may be quoted.

        Examples
        --------
        .. code:: ini

           [metric-short]
           name = 'Short answers'
           description = 'Responses of at most three tokens'
           unit = %
           method = mypackage.metrics.short_answers
        """
        def _get(key):
            if config.has_option(section, key):
                return re_quote.sub('', config.get(section, key)) or None
            return None

        return cls(_import_method(config.get(section, 'method')),
                   name=_get('name') or section,
                   description=_get('description'), unit=_get('unit'))
