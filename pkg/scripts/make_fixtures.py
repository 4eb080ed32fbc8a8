#!/usr/bin/env python3
"""Regenerate the committed test fixtures from scikit-image sample data.

Writes 256x256 8-bit grayscale PGM center crops of five standard natural
images into tests/data/, plus a 64x64 crop used by the solver regression
test. Run from the repository root; scikit-image is only needed here, not
by the package or its tests.
"""

from pathlib import Path

import numpy as np
from skimage import data

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from arnl.imageio import to_luminance, write_pgm  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"


def center_crop(img: np.ndarray, size: int) -> np.ndarray:
    r = (img.shape[0] - size) // 2
    c = (img.shape[1] - size) // 2
    return img[r : r + size, c : c + size]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    sources = {
        "camera": data.camera(),
        "moon": data.moon(),
        "brick": data.brick(),
        "astronaut": data.astronaut(),
        "coffee": data.coffee(),
    }
    for name, img in sources.items():
        img = img.astype(np.float64)
        if img.ndim == 3:
            img = to_luminance(img)
        crop = center_crop(img, 256)
        (OUT / f"{name}.pgm").write_bytes(write_pgm(crop))
        print(f"wrote tests/data/{name}.pgm {crop.shape}")
    small = center_crop(data.camera().astype(np.float64), 64)
    (OUT / "camera64.pgm").write_bytes(write_pgm(small))
    print(f"wrote tests/data/camera64.pgm {small.shape}")


if __name__ == "__main__":
    main()
