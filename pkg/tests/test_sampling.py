import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arnl.sampling import SamplingSpec, adjoint_upsample, downsample, sample_mask


def test_downsample_decimates():
    img = np.arange(16.0).reshape(4, 4)
    np.testing.assert_array_equal(downsample(img, SamplingSpec()), [[0, 2], [8, 10]])


def test_downsample_constant_fixed_point():
    img = np.full((6, 8), 42.0)
    out = downsample(img, SamplingSpec())
    np.testing.assert_array_equal(out, np.full((3, 4), 42.0))


def test_downsample_phase():
    img = np.array([[7.0, 1.0], [2.0, 9.0]])
    out = downsample(img, SamplingSpec(2, (1, 1)))
    np.testing.assert_array_equal(out, [[9.0]])


def test_downsample_requires_divisible_dims():
    with pytest.raises(ValueError):
        downsample(np.ones((3, 4)), SamplingSpec())


def test_adjoint_places_samples():
    out = adjoint_upsample(np.array([[5.0]]), SamplingSpec(), (2, 2))
    np.testing.assert_array_equal(out, [[5, 0], [0, 0]])


def test_adjoint_dimension_mismatch():
    with pytest.raises(ValueError):
        adjoint_upsample(np.ones((2, 2)), SamplingSpec(), (5, 4))


def test_down_after_up_is_identity(rng):
    y = rng.uniform(0, 255, (3, 5))
    spec = SamplingSpec(2, (1, 0))
    np.testing.assert_array_equal(downsample(adjoint_upsample(y, spec, (6, 10)), spec), y)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1),
       phase=st.tuples(st.integers(0, 1), st.integers(0, 1)))
def test_adjoint_identity_brute_force(seed, phase):
    """<Dx, y> computed by explicit loops equals <x, D^T y>."""
    g = np.random.default_rng(seed)
    spec = SamplingSpec(2, phase)
    x = g.uniform(-1, 1, (6, 6))
    y = g.uniform(-1, 1, (3, 3))
    lhs = 0.0
    for i in range(3):
        for j in range(3):
            lhs += x[2 * i + phase[0], 2 * j + phase[1]] * y[i, j]
    rhs = float(np.sum(x * adjoint_upsample(y, spec, (6, 6))))
    assert abs(lhs - rhs) <= 1e-12


def test_mask_counts_and_projection(rng):
    spec = SamplingSpec()
    mask = sample_mask(spec, (4, 4))
    assert mask.sum() == 4
    assert set(np.unique(mask)) <= {0.0, 1.0}
    x = rng.uniform(0, 255, (4, 4))
    np.testing.assert_allclose(mask * x, adjoint_upsample(downsample(x, spec), spec, (4, 4)),
                               atol=0)


def test_spec_validation():
    with pytest.raises(ValueError):
        SamplingSpec(1)
    with pytest.raises(ValueError):
        SamplingSpec(2, (2, 0))
