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

"""Command-line utilities for mixgrpo
"""

import logging
from collections import OrderedDict

import coloredlogs

LOG_FORMAT = '%(name)s %(asctime)s %(levelname)+8s: %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def logger(name='mixgrpo', level='INFO'):
    """Create a `logging.Logger` with coloured output

    Parameters
    ----------
    name : `str`, optional
        name of the logger; loggers below this name (e.g.
        ``mixgrpo.rl``) share its handler
    level : `str`, `int`, optional
        the logging level

    Returns
    -------
    logger : `logging.Logger`
    """
    log = logging.getLogger(name)
    coloredlogs.install(level=level, logger=log, fmt=LOG_FORMAT,
                        datefmt=LOG_DATEFMT)
    log.setLevel(level)
    return log


from . import (  # noqa: E402
    evaluate,
    selftest,
    sft,
    sweep,
    train,
)

ACTIONS = OrderedDict([
    ('sft', sft),
    ('train', train),
    ('eval', evaluate),
    ('sweep', sweep),
    ('poe-selftest', selftest),
])
