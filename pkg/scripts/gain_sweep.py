#!/usr/bin/env python3
"""Sweep solver settings over the committed fixtures and report PSNR gains
against bicubic. Development aid for choosing defaults."""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np  # noqa: E402

from arnl.ar_local import PatchWeightParams  # noqa: E402
from arnl.bicubic import bicubic_upscale  # noqa: E402
from arnl.imageio import read_image  # noqa: E402
from arnl.metrics import psnr  # noqa: E402
from arnl.sampling import downsample  # noqa: E402
from arnl.solver import ARStageConfig, SolverConfig, interpolate  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
NAMES = ["astronaut", "brick", "camera", "coffee", "moon"]


def evaluate(cfg: SolverConfig):
    spec = cfg.sampling
    gains = {}
    for name in NAMES:
        hr = read_image(DATA / f"{name}.pgm")
        lr = downsample(hr, spec)
        base = psnr(hr, bicubic_upscale(lr, spec))
        t0 = time.time()
        rec, _ = interpolate(lr, cfg)
        gains[name] = (psnr(hr, rec) - base, time.time() - t0)
    return gains


def show(tag: str, cfg: SolverConfig):
    gains = evaluate(cfg)
    mean = np.mean([g for g, _ in gains.values()])
    parts = " ".join(f"{n}:{g:+.3f}" for n, (g, _) in gains.items())
    secs = sum(dt for _, dt in gains.values())
    print(f"{tag:<28} mean {mean:+.3f} | {parts} | {secs:.0f}s", flush=True)


if __name__ == "__main__":
    configs = {
        "defaults": SolverConfig(),
        "lambda=1.0": SolverConfig(lam=1.0),
        "lambda=0.25": SolverConfig(lam=0.25),
        "gamma=0.8": SolverConfig(gamma=0.8),
        "gamma=3.2": SolverConfig(gamma=3.2),
        "mu=0.008": SolverConfig(ar=ARStageConfig(patch=PatchWeightParams(5, 0.008))),
        "window=7": SolverConfig(ar=ARStageConfig(window=7)),
        "iters=6": SolverConfig(max_iters=6),
        "iters=14": SolverConfig(max_iters=14),
    }
    for tag, cfg in configs.items():
        show(tag, cfg)
