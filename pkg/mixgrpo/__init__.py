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

"""Group relative policy optimisation with logit-mixed reference policies
"""

__version__ = '0.1.0'

from .model import (  # noqa: F401,E402
    Policy,
    init_policy,
)
from .mixer import (  # noqa: F401,E402
    EnsembleSpec,
    MixSpec,
    MixedPolicy,
)
from .rl import (  # noqa: F401,E402
    GrpoConfig,
    run_grpo,
)
from .adaptive import (  # noqa: F401,E402
    AdaptiveConfig,
    run_adaptive_grpo,
)
from .core import (  # noqa: F401,E402
    evaluate,
)
