import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from rqubo.instance import CouplingMatrix  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def hand():
    """J = [[0, -1], [-1, 0]] with W = 1/sqrt(2): min -sqrt(2) at (1, 1), max 0."""
    return CouplingMatrix.from_dense([[0.0, -1.0], [-1.0, 0.0]], w=1 / np.sqrt(2))
