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

"""Exception types raised by mixgrpo

Each type derives from the builtin exception a caller would otherwise
expect, so ``except ValueError`` keeps working.
"""

__all__ = ['ShapeError', 'InputError', 'ConfigError', 'ContractError',
           'DomainError', 'NumericalError']


class ShapeError(ValueError):
    """Operand shapes are incompatible
    """


class InputError(ValueError):
    """An input sequence or file is malformed
    """


class ConfigError(ValueError):
    """A configuration value is missing, unknown, or out of range
    """


class ContractError(RuntimeError):
    """An object was used against its contract (e.g. updating a frozen policy)
    """


class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation
    """


class NumericalError(FloatingPointError):
    """A computation produced a non-finite value
    """
