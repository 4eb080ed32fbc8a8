"""Objective quality metrics: MSE and PSNR."""

from __future__ import annotations

import numpy as np

from .image_core import as_image

PSNR_CAP_DB = 99.0


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared pixel difference."""
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 255.0) -> float:
    """10*log10(peak^2 / mse) in dB, capped at 99 so output stays finite."""
    err = mse(a, b)
    if err == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(peak * peak / err), PSNR_CAP_DB)
