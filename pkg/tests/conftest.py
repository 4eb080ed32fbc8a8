from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def data_dir():
    return DATA_DIR


def reflect_fold(i: int, n: int) -> int:
    """Independent mirror-index fold used by test oracles."""
    if n == 1:
        return 0
    period = 2 * (n - 1)
    j = abs(i) % period
    return period - j if j >= n else j
