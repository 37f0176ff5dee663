import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hadwiger.hexlattice import make_torus  # noqa: E402


@pytest.fixture(scope="session")
def t33():
    return make_torus(3, 3)


@pytest.fixture(scope="session")
def t66():
    return make_torus(6, 6)


@pytest.fixture(scope="session")
def t36():
    return make_torus(3, 6)
