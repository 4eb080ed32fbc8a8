"""Decimation operator, its adjoint, and the retained-sample mask.

Downsampling is pure decimation: keep one pixel per factor x factor cell at
a fixed phase, no pre-filter. This makes the composition of the operator
with its adjoint a diagonal 0/1 mask, which the data sub-problem of the
solver exploits for an elementwise closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_core import as_image


@dataclass(frozen=True)
class SamplingSpec:
    """Integer decimation factor and (row, col) phase of retained samples."""

    factor: int = 2
    phase: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.factor < 2:
            raise ValueError(f"factor must be >= 2, got {self.factor}")
        pr, pc = self.phase
        if not (0 <= pr < self.factor and 0 <= pc < self.factor):
            raise ValueError(f"phase {self.phase} out of range for factor {self.factor}")


def _check_divisible(shape, factor):
    if shape[0] % factor or shape[1] % factor:
        raise ValueError(f"image shape {shape} not divisible by factor {factor}")


def downsample(hr: np.ndarray, spec: SamplingSpec) -> np.ndarray:
    """Keep hr[factor*i + phase_row, factor*j + phase_col]."""
    hr = as_image(hr)
    _check_divisible(hr.shape, spec.factor)
    pr, pc = spec.phase
    return hr[pr :: spec.factor, pc :: spec.factor].copy()


def adjoint_upsample(lr: np.ndarray, spec: SamplingSpec, hr_shape: tuple[int, int]) -> np.ndarray:
    """Exact adjoint of :func:`downsample`: samples back in place, zeros elsewhere."""
    lr = as_image(lr)
    if (lr.shape[0] * spec.factor, lr.shape[1] * spec.factor) != tuple(hr_shape):
        raise ValueError(
            f"hr shape {hr_shape} incompatible with lr shape {lr.shape} "
            f"at factor {spec.factor}"
        )
    hr = np.zeros(hr_shape, dtype=np.float64)
    pr, pc = spec.phase
    hr[pr :: spec.factor, pc :: spec.factor] = lr
    return hr


def sample_mask(spec: SamplingSpec, hr_shape: tuple[int, int]) -> np.ndarray:
    """Binary image: 1 at retained coordinates. Equals the diagonal of D^T D."""
    _check_divisible(hr_shape, spec.factor)
    mask = np.zeros(hr_shape, dtype=np.float64)
    pr, pc = spec.phase
    mask[pr :: spec.factor, pc :: spec.factor] = 1.0
    return mask
