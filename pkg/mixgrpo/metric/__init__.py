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

""".. currentmodule:: mixgrpo
#######
Metrics
#######

mixgrpo defines a custom `Metric` object, wrapping figure-of-merit
functions of one or two `~mixgrpo.core.EvalReport` objects into a
standard interface with a name, a description and a unit.
"""

from .core import Metric  # noqa: F401
from .registry import (  # noqa: F401
    register_metric,
    get_all_metrics,
    get_metric,
)
from .metrics import (  # noqa: F401
    answer_rate,
    disagreement,
    format_rate,
    mean_response_length,
    mean_reward,
)

__all__ = ['Metric', 'register_metric', 'get_metric', 'get_all_metrics',
           'format_rate', 'answer_rate', 'mean_reward',
           'mean_response_length', 'disagreement']
