import sys
from pathlib import Path

import numpy as np
import pytest

TESTS_DIR = Path(__file__).resolve().parent
REPO_ROOT = TESTS_DIR.parent
DATA_DIR = REPO_ROOT / "data"

if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture
def rng():
    return np.random.default_rng(987)


@pytest.fixture(scope="session")
def fixture_csv() -> Path:
    """The bundled synthetic close-price fixture."""
    path = DATA_DIR / "synthetic_prices.csv"
    assert path.exists(), "bundled fixture missing; run python -m portlab.synthetic"
    return path
