from __future__ import annotations

import numpy as np
import pytest

from turbofade.trellis import RscSpec, build_trellis


@pytest.fixture(scope="session")
def trellis():
    return build_trellis(RscSpec())


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
