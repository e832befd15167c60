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

"""Run configuration

A run is configured by an INI file with the sections below; every key is
optional and unknown keys are rejected. Keys left empty take their value
from the selected recipe (``[train] recipe``) or adaptive preset.

.. code-block:: ini

   [run]
   seed = 1

   [train]
   recipe = adaptive-mix

   [adaptive]
   preset = large

Sections named ``[metric-<name>]`` define extra metrics, see
`mixgrpo.metric.Metric.from_ini`.
"""

import os
from collections import OrderedDict
from configparser import (ConfigParser, Error as ConfigParserError)

from .errors import ConfigError

__all__ = ['RunConfig', 'SCHEMA', 'RUN_ROOT_VARIABLE', 'run_directory']

RUN_ROOT_VARIABLE = 'MIXGRPO_RUN_ROOT'

METRIC_SECTION_PREFIX = 'metric-'
METRIC_KEYS = ('name', 'description', 'unit', 'method')


def _floats(value):
    return tuple(float(v) for v in value.replace(',', ' ').split())


def _words(value):
    return tuple(v for v in value.replace(',', ' ').split())


# section -> key -> (type, default); a default of None means 'take from
# the recipe or preset'
SCHEMA = OrderedDict([
    ('run', OrderedDict([
        ('label', (str, 'mixgrpo')),
        ('seed', (int, 0)),
        ('nproc', (int, 1)),
    ])),
    ('task', OrderedDict([
        ('min_operand', (int, 0)),
        ('max_operand', (int, 19)),
        ('operators', (str, '+')),
        ('train_size', (int, 2000)),
        ('corpus_size', (int, 1000)),
        ('corruption_rate', (float, 0.3)),
    ])),
    ('model', OrderedDict([
        ('width', (int, 48)),
        ('depth', (int, 2)),
        ('max_len', (int, 16)),
        ('optimizer', (str, 'sgd')),
    ])),
    ('sft', OrderedDict([
        ('epochs', (int, 30)),
        ('batch_size', (int, 16)),
        ('learning_rate', (float, 0.5)),
        ('corpus', (str, None)),
    ])),
    ('grpo', OrderedDict([
        ('iterations', (int, 50)),
        ('inner_epochs', (int, 1)),
        ('group_size', (int, 8)),
        ('clip_eps', (float, 0.2)),
        ('adv_eps', (float, 1e-4)),
        ('learning_rate', (float, 0.2)),
        ('batch_size', (int, 16)),
        ('max_response_len', (int, 6)),
        ('kl_beta', (float, None)),
        ('drop_zero_variance', (bool, False)),
    ])),
    ('mix', OrderedDict([
        ('scheme', (str, None)),
        ('alpha', (float, None)),
    ])),
    ('adaptive', OrderedDict([
        ('preset', (str, 'desk')),
        ('c_o', (float, None)),
        ('c_d', (float, None)),
        ('validation_size', (int, None)),
        ('alpha0', (float, 0.5)),
    ])),
    ('eval', OrderedDict([
        ('heldout_size', (int, 200)),
        ('curve_size', (int, 500)),
        ('max_len', (int, 6)),
        ('eval_every', (int, 0)),
        ('alphas', (_floats, '0.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8 0.9 1.0')),
        ('schemes', (_words, 'logit prob')),
    ])),
    ('train', OrderedDict([
        ('recipe', (str, 'fixed-mix')),
        ('init', (str, None)),
        ('anchor', (str, None)),
        ('reference', (str, None)),
        ('base', (str, None)),
        ('checkpoint_every', (int, 0)),
    ])),
])


class RunConfig(ConfigParser):
    """A `~configparser.ConfigParser` that knows the run schema

    Every schema section is present after construction, holding the
    defaults; option names are case-sensitive.
    """
    def __init__(self, **kwargs):
        kwargs.setdefault('interpolation', None)
        super(RunConfig, self).__init__(**kwargs)
        for section, keys in SCHEMA.items():
            self.add_section(section)
            for key, (_, default) in keys.items():
                self.set(section, key, '' if default is None else
                         str(default))

    def optionxform(self, optionstr):
        return optionstr

    # -- input ------------------------------

    @classmethod
    def from_files(cls, paths=(), overrides=()):
        """Read configuration files, then apply ``section.key=value``
        overrides

        Raises
        ------
        mixgrpo.errors.ConfigError
            if a file is missing or unreadable, or names an unknown key
        """
        config = cls()
        for path in paths:
            if not os.path.isfile(path):
                raise ConfigError("configuration file %s not found" % path)
            try:
                config.read(path)
            except ConfigParserError as exc:
                raise ConfigError("cannot parse %s: %s" % (path, exc))
        for item in overrides:
            config.set_override(item)
        config.validate()
        return config

    def set_override(self, item):
        """Apply a single ``section.key=value`` override
        """
        try:
            name, value = item.split('=', 1)
            section, key = name.strip().split('.', 1)
        except ValueError:
            raise ConfigError("cannot parse override %r, expected "
                              "section.key=value" % item)
        section, key = section.strip(), key.strip()
        self._check_key(section, key)
        if not self.has_section(section):
            self.add_section(section)
        self.set(section, key, value.strip())

    def _check_key(self, section, key):
        if section.startswith(METRIC_SECTION_PREFIX):
            if key not in METRIC_KEYS:
                raise ConfigError("unknown configuration key %s.%s"
                                  % (section, key))
            return
        if section not in SCHEMA:
            raise ConfigError("unknown configuration section [%s]" % section)
        if key not in SCHEMA[section]:
            raise ConfigError("unknown configuration key %s.%s"
                              % (section, key))

    def validate(self):
        """Reject unknown sections and keys, and values of the wrong type
        """
        for section in self.sections():
            for key in self.options(section):
                self._check_key(section, key)
                if section in SCHEMA:
                    self.typed(section, key)
        for section in self.metric_sections():
            if not self.has_option(section, 'method'):
                raise ConfigError("%s.method is required" % section)

    # -- output -----------------------------

    def typed(self, section, key):
        """Return the value of ``section.key`` converted to its schema type

        Returns `None` for an empty value.
        """
        self._check_key(section, key)
        kind = SCHEMA[section][key][0]
        raw = self.get(section, key).strip()
        if raw == '':
            return None
        try:
            if kind is bool:
                return self.getboolean(section, key)
            return kind(raw)
        except ValueError as exc:
            raise ConfigError("invalid value for %s.%s: %s"
                              % (section, key, exc))

    def section_dict(self, section):
        """All typed values of one section
        """
        return OrderedDict((key, self.typed(section, key)) for
                           key in SCHEMA[section])

    def metric_sections(self):
        return [s for s in self.sections() if
                s.startswith(METRIC_SECTION_PREFIX)]

    def write_resolved(self, path, **provenance):
        """Write this configuration, with provenance, to ``path``

        Provenance values (e.g. the build identifier) are written as
        comments so the file can be read back as a configuration.
        """
        with open(path, 'w') as fobj:
            for key, value in sorted(provenance.items()):
                fobj.write('# %s = %s\n' % (key, value))
            self.write(fobj)
        return path

    # -- builders ---------------------------

    def difficulty(self):
        from .tasks import Difficulty
        return Difficulty(self.typed('task', 'min_operand'),
                          self.typed('task', 'max_operand'),
                          self.typed('task', 'operators'))

    def sft_config(self):
        from .sft import SftConfig
        return SftConfig(epochs=self.typed('sft', 'epochs'),
                         batch_size=self.typed('sft', 'batch_size'),
                         learning_rate=self.typed('sft', 'learning_rate'),
                         seed=self.typed('run', 'seed'),
                         optimizer=self.typed('model', 'optimizer'))

    def recipe(self):
        """The recipe parameters, with any explicit overrides applied
        """
        from .recipes import get_recipe
        params = get_recipe(self.typed('train', 'recipe'))
        for key, (section, name) in (('scheme', ('mix', 'scheme')),
                                     ('alpha', ('mix', 'alpha')),
                                     ('kl_beta', ('grpo', 'kl_beta')),
                                     ('init', ('train', 'init'))):
            value = self.typed(section, name)
            if value is not None:
                params[key] = value
        if params['init'] not in ('sft', 'base'):
            raise ConfigError("train.init must be 'sft' or 'base', got %r"
                              % params['init'])
        return params

    def grpo_config(self, recipe=None):
        from .rl import GrpoConfig
        recipe = recipe or self.recipe()
        kwargs = self.section_dict('grpo')
        kwargs['kl_beta'] = recipe['kl_beta']
        return GrpoConfig(seed=self.typed('run', 'seed'),
                          optimizer=self.typed('model', 'optimizer'),
                          nproc=self.typed('run', 'nproc'), **kwargs)

    def adaptive_config(self):
        from .adaptive import (AdaptiveConfig, PRESETS)
        preset = self.typed('adaptive', 'preset')
        if preset not in PRESETS:
            raise ConfigError("unknown adaptive.preset %r, choose one of: %s"
                              % (preset, ', '.join(sorted(PRESETS))))
        c_o, c_d, size = PRESETS[preset]
        c_o = _default(self.typed('adaptive', 'c_o'), c_o)
        c_d = _default(self.typed('adaptive', 'c_d'), c_d)
        size = _default(self.typed('adaptive', 'validation_size'), size)
        if size < 1:
            raise ConfigError("adaptive.validation_size must be positive")
        from .tasks import generate_problems
        validation = generate_problems(self.typed('run', 'seed'), size,
                                       difficulty=self.difficulty(),
                                       split='validation')
        return AdaptiveConfig(c_o, c_d, validation,
                              alpha0=self.typed('adaptive', 'alpha0'),
                              max_len=self.typed('eval', 'max_len'))

    def metrics(self):
        """Build the `~mixgrpo.metric.Metric` of each ``[metric-*]``
        section
        """
        from .metric import Metric
        return [Metric.from_ini(self, section) for
                section in self.metric_sections()]


def _default(value, default):
    return default if value is None else value


def run_directory(config, output=None):
    """The directory for a run's outputs

    Uses ``output`` if given, else ``$MIXGRPO_RUN_ROOT/<label>``, else
    ``./runs/<label>``; the directory is created.
    """
    if not output:
        root = os.environ.get(RUN_ROOT_VARIABLE) or 'runs'
        output = os.path.join(root, config.typed('run', 'label'))
    if not os.path.isdir(output):
        os.makedirs(output)
    return output
