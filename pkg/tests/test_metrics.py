import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arnl.metrics import mse, psnr


def test_mse_identity_and_constant():
    a = np.arange(12.0).reshape(3, 4)
    assert mse(a, a) == 0.0
    assert mse(a, a + 255.0) == 255.0 ** 2


def test_mse_symmetry(rng):
    a = rng.uniform(0, 255, (5, 5))
    b = rng.uniform(0, 255, (5, 5))
    assert mse(a, b) == mse(b, a)


def test_mse_shape_mismatch():
    with pytest.raises(ValueError):
        mse(np.ones((2, 2)), np.ones((2, 3)))


def test_psnr_cap_and_endpoints():
    a = np.full((4, 4), 9.0)
    assert psnr(a, a) == 99.0
    assert psnr(a, a + 255.0) == pytest.approx(0.0, abs=1e-12)


def test_psnr_uniform_unit_difference():
    a = np.zeros((8, 8))
    assert psnr(a, a + 1.0) == pytest.approx(20 * np.log10(255), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_psnr_symmetric(seed):
    g = np.random.default_rng(seed)
    a = g.uniform(0, 255, (4, 4))
    b = g.uniform(0, 255, (4, 4))
    assert psnr(a, b) == psnr(b, a)


def test_psnr_strictly_decreasing_with_error():
    # below the cap, growing a single pixel's error strictly lowers psnr
    base = np.zeros((4, 4))
    last = np.inf
    for delta in (1.0, 2.0, 5.0, 50.0):
        img = base.copy()
        img[2, 2] = delta
        value = psnr(base, img)
        assert value < last
        last = value
