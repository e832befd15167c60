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

"""Training recipes
"""

import re

from .errors import ConfigError

_DEFAULTS = {
    'scheme': 'none',
    'alpha': 0.,
    'kl_beta': 0.,
    'adaptive': False,
    'init': 'base',
}

RECIPES = {}

re_sep = re.compile(r'[\s_]+')


def register_recipe(name, force=False, **parameters):
    """Store parameters for a new recipe, or override an existing set
    """
    name = name.lower()
    if name in RECIPES and not force:
        raise RuntimeError("recipe already registered for name %r" % name)
    unknown = set(parameters) - set(_DEFAULTS)
    if unknown:
        raise ConfigError("unknown recipe parameters: %s"
                          % ', '.join(sorted(unknown)))
    RECIPES[name] = _DEFAULTS.copy()
    RECIPES[name].update(parameters)
    return RECIPES[name]


def get_recipe(name):
    """Return a copy of the parameters registered for a recipe

    Raises
    ------
    mixgrpo.errors.ConfigError
        if no recipe is registered under this name or an alias of it
    """
    canon = get_canonical_recipe_name(name)
    try:
        return RECIPES[canon].copy()
    except KeyError:
        raise ConfigError("unknown recipe %r, choose one of: %s"
                          % (name, ', '.join(sorted(RECIPES))))


# map of equivalent recipe names
RECIPE_EQUIVALENTS = [
    ['kl-grpo', 'grpo-kl', 'kl'],
    ['grpo-nokl', 'grpo', 'nokl'],
    ['fixed-mix', 'fixed', 'logit-mix'],
    ['prob-mix', 'prob'],
    ['adaptive-mix', 'adaptive'],
]


def get_canonical_recipe_name(name):
    name = re_sep.sub('-', name.strip().lower())
    for group in RECIPE_EQUIVALENTS:
        if name in group:
            return group[0]
    return name


# -----------------------------------------------------------------------------
# register the standard recipes

register_recipe('kl-grpo', kl_beta=0.01, init='sft')
register_recipe('grpo-nokl', init='sft')
register_recipe('fixed-mix', scheme='logit', alpha=0.5)
register_recipe('prob-mix', scheme='prob', alpha=0.5)
register_recipe('adaptive-mix', scheme='logit', alpha=0.5, adaptive=True)
