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

"""Configuration for the mixgrpo test suite
"""

import os

import hypothesis
import numpy
import pytest

numpy.seterr(all="warn")

hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

RUN_SLOW = os.getenv("MIXGRPO_RUN_SLOW", "0") == "1"


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: desk-scale training experiments "
                   "(set MIXGRPO_RUN_SLOW=1 to run)")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="set MIXGRPO_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def tiny_policy():
    from mixgrpo.model import init_policy
    from mixgrpo.tasks import VOCAB_SIZE
    return init_policy(VOCAB_SIZE, width=8, max_len=16, depth=2, seed=3)


@pytest.fixture
def tiny_reference():
    from mixgrpo.model import init_policy
    from mixgrpo.tasks import VOCAB_SIZE
    return init_policy(VOCAB_SIZE, width=8, max_len=16, depth=2,
                       seed=4).snapshot()
