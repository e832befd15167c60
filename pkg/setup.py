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

"""Setup the mixed-policy GRPO (`mixgrpo`) package
"""

import re
from pathlib import Path

from setuptools import setup

cmdclass = {}
try:
    from sphinx.setup_command import BuildDoc
except ImportError:
    pass
else:
    cmdclass['build_sphinx'] = BuildDoc

# the version is defined once, in the package
version = re.search(
    r"^__version__ = '(.*)'$",
    (Path(__file__).parent / 'mixgrpo' / '__init__.py').read_text(),
    re.MULTILINE,
).group(1)

# run setup
# NOTE: all other metadata and options come from setup.cfg
setup(
    version=version,
    cmdclass=cmdclass,
)
