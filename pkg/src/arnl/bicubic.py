"""Cubic-convolution upscaling (Keys kernel) for the initializer and baseline.

The kernel with parameter a = -0.5 is the classic four-tap cubic used by
every "bicubic" baseline in the interpolation literature. The upscaler is
separable and grid-aligned with the decimation phase: the retained HR
coordinates reproduce the LR pixels exactly, so reconstruction starts out
node-consistent with the observation.
"""

from __future__ import annotations

import numpy as np

from .image_core import as_image, reflect_index
from .sampling import SamplingSpec

KEYS_A = -0.5


def keys_kernel(t, a: float = KEYS_A):
    """Piecewise-cubic interpolation weight at offset ``t``.

    (a+2)|t|^3 - (a+3)|t|^2 + 1       for |t| <= 1
    a|t|^3 - 5a|t|^2 + 8a|t| - 4a     for 1 < |t| < 2
    0                                 otherwise
    """
    at = np.abs(np.asarray(t, dtype=np.float64))
    inner = ((a + 2.0) * at - (a + 3.0)) * at * at + 1.0
    outer = a * (((at - 5.0) * at + 8.0) * at - 4.0)
    w = np.where(at <= 1.0, inner, np.where(at < 2.0, outer, 0.0))
    return float(w) if np.isscalar(t) else w


def _upsample_axis0(arr: np.ndarray, factor: int, phase: int, a: float) -> np.ndarray:
    """Interpolate along axis 0: output index h reads LR coordinate (h-phase)/factor."""
    n = arr.shape[0]
    h = np.arange(n * factor, dtype=np.float64)
    t = (h - phase) / factor
    base = np.floor(t).astype(np.int64)
    f = t - base
    weights = (keys_kernel(f + 1.0, a), keys_kernel(f, a),
               keys_kernel(1.0 - f, a), keys_kernel(2.0 - f, a))
    out = np.zeros((n * factor,) + arr.shape[1:], dtype=np.float64)
    for m, w in zip((-1, 0, 1, 2), weights):
        idx = reflect_index(base + m, n)
        out += w[:, None] * arr[idx]
    return out


def bicubic_upscale(lr: np.ndarray, spec: SamplingSpec, a: float = KEYS_A) -> np.ndarray:
    """Upscale ``lr`` by ``spec.factor`` per axis with separable Keys convolution.

    HR pixels at the retained coordinates (factor*i + phase) equal the LR
    pixels exactly; all other phases are 4-tap interpolated, with mirror
    reflection supplying out-of-range taps.
    """
    lr = as_image(lr)
    hr = _upsample_axis0(lr, spec.factor, spec.phase[0], a)
    hr = _upsample_axis0(hr.T, spec.factor, spec.phase[1], a).T
    return hr
