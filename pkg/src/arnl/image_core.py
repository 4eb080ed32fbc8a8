"""Canonical image representation and border handling.

An image is a 2-D float64 numpy array in row-major order, nominal intensity
range [0, 255] (values stay fractional inside the pipeline; quantization to
8 bit happens only at file output). All border access anywhere in the
package uses symmetric mirror reflection without repeating the edge pixel.
"""

from __future__ import annotations

import numpy as np


def as_image(data) -> np.ndarray:
    """Validate and convert ``data`` to a 2-D float64 image array.

    Raises ValueError for anything that is not a finite, non-empty 2-D grid.
    """
    img = np.asarray(data, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite intensities")
    return img


def reflect_index(i: np.ndarray | int, n: int):
    """Fold index ``i`` into [0, n) by mirror reflection without edge repeat.

    Well defined for any offset (period 2(n-1)); a length-1 axis maps
    everything to 0.
    """
    if n == 1:
        return np.zeros_like(np.asarray(i))
    period = 2 * (n - 1)
    j = np.abs(np.asarray(i)) % period
    return np.where(j >= n, period - j, j)


def pad_reflect(img: np.ndarray, margin: int) -> np.ndarray:
    """Mirror-pad ``img`` by ``margin`` pixels on every side.

    The reflection does not repeat the border pixel: a row [1,2,3] padded by
    one becomes [2,1,2,3,2]. A length-1 axis replicates (the mirror image of
    a single sample is itself); otherwise the margin must be smaller than
    the axis length, since a larger margin has no single-reflection meaning.
    """
    img = as_image(img)
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if margin == 0:
        return img.copy()
    for n in img.shape:
        if n > 1 and margin >= n:
            raise ValueError(
                f"margin {margin} too large for image of shape {img.shape}: "
                "reflection is undefined past the opposite border"
            )
    return np.pad(img, margin, mode="reflect")


def box_sum(field: np.ndarray, size: int) -> np.ndarray:
    """Valid-mode size x size window sums over the last two axes."""
    cs = field.cumsum(-2).cumsum(-1)
    cs = np.pad(cs, [(0, 0)] * (field.ndim - 2) + [(1, 0), (1, 0)])
    return (cs[..., size:, size:] - cs[..., :-size, size:]
            - cs[..., size:, :-size] + cs[..., :-size, :-size])


def crop(img: np.ndarray, row0: int, col0: int, height: int, width: int) -> np.ndarray:
    """Return the height x width sub-image with top-left corner (row0, col0)."""
    img = as_image(img)
    if height < 1 or width < 1:
        raise ValueError(f"crop size must be >= 1x1, got {height}x{width}")
    if row0 < 0 or col0 < 0 or row0 + height > img.shape[0] or col0 + width > img.shape[1]:
        raise ValueError(
            f"crop rectangle ({row0},{col0},{height},{width}) exceeds "
            f"image of shape {img.shape}"
        )
    return img[row0 : row0 + height, col0 : col0 + width].copy()
