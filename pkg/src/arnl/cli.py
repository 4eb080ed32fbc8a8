"""Command-line front end: interpolate, evaluate, benchmark.

All three commands are deterministic (no clock, RNG, or environment input
reaches the numerics) and echo the full solver configuration into their
CSV output for provenance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .ar_local import DIAGONAL4, NeighborLayout, PatchWeightParams
from .bicubic import bicubic_upscale
from .imageio import read_image, write_image
from .metrics import psnr
from .nonlocal3d import BlockMatchParams
from .sampling import SamplingSpec, downsample
from .solver import ARStageConfig, SolverConfig, interpolate

LAYOUTS = {
    "diag4": DIAGONAL4,
    "axial4": ((-1, 0), (0, -1), (0, 1), (1, 0)),
    "eight": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}

_IMAGE_SUFFIXES = (".pgm", ".png")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    d = SolverConfig()
    g = parser.add_argument_group("solver configuration overrides")
    g.add_argument("--lambda", dest="lam", type=float, default=d.lam)
    g.add_argument("--gamma", type=float, default=d.gamma)
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--beta", type=float, default=d.beta)
    g.add_argument("--max-iters", type=int, default=d.max_iters)
    g.add_argument("--literal-init", type=int, choices=(0, 1), default=int(d.literal_init))
    g.add_argument("--pin-samples", type=int, choices=(0, 1), default=int(d.pin_samples))
    g.add_argument("--ar-layout", choices=sorted(LAYOUTS), default="diag4")
    g.add_argument("--ar-layout2", choices=sorted(LAYOUTS), default="axial4")
    g.add_argument("--ar-patch-size", type=int, default=d.ar.patch.patch_size)
    g.add_argument("--ar-mu", type=float, default=d.ar.patch.mu)
    g.add_argument("--ar-window", type=int, default=d.ar.window)
    g.add_argument("--ar-ridge", type=float, default=d.ar.ridge)
    g.add_argument("--nl-block-size", type=int, default=d.nl.block_size)
    g.add_argument("--nl-levels", type=int, default=d.nl.levels)
    g.add_argument("--nl-search-radius", type=int, default=d.nl.search_radius)
    g.add_argument("--nl-max-group", type=int, default=d.nl.max_group)
    g.add_argument("--nl-epsilon", type=float, default=d.nl.epsilon)
    g.add_argument("--nl-stride", type=int, default=d.nl.stride)
    g.add_argument("--factor", type=int, default=d.sampling.factor)
    g.add_argument("--phase-row", type=int, default=d.sampling.phase[0])
    g.add_argument("--phase-col", type=int, default=d.sampling.phase[1])


def _config_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        lam=args.lam,
        gamma=args.gamma,
        alpha=args.alpha,
        beta=args.beta,
        max_iters=args.max_iters,
        literal_init=bool(args.literal_init),
        pin_samples=bool(args.pin_samples),
        ar=ARStageConfig(
            layout=NeighborLayout(LAYOUTS[args.ar_layout]),
            layout2=NeighborLayout(LAYOUTS[args.ar_layout2]),
            patch=PatchWeightParams(args.ar_patch_size, args.ar_mu),
            window=args.ar_window,
            ridge=args.ar_ridge,
        ),
        nl=BlockMatchParams(
            block_size=args.nl_block_size,
            search_radius=args.nl_search_radius,
            max_group=args.nl_max_group,
            epsilon=args.nl_epsilon,
            stride=args.nl_stride,
            levels=args.nl_levels,
        ),
        sampling=SamplingSpec(args.factor, (args.phase_row, args.phase_col)),
    )


def config_lines(cfg: SolverConfig) -> list[str]:
    """Flat key=value rendering of the full configuration."""
    items = [
        ("lambda", cfg.lam), ("gamma", cfg.gamma), ("alpha", cfg.alpha),
        ("beta", cfg.beta), ("max_iters", cfg.max_iters),
        ("literal_init", int(cfg.literal_init)), ("pin_samples", int(cfg.pin_samples)),
        ("ar_layout", ";".join(f"{dr},{dc}" for dr, dc in cfg.ar.layout.offsets)),
        ("ar_layout2", ";".join(f"{dr},{dc}" for dr, dc in cfg.ar.layout2.offsets)),
        ("ar_patch_size", cfg.ar.patch.patch_size), ("ar_mu", cfg.ar.patch.mu),
        ("ar_window", cfg.ar.window), ("ar_ridge", cfg.ar.ridge),
        ("nl_block_size", cfg.nl.block_size), ("nl_levels", cfg.nl.levels),
        ("nl_search_radius", cfg.nl.search_radius), ("nl_max_group", cfg.nl.max_group),
        ("nl_epsilon", cfg.nl.epsilon), ("nl_stride", cfg.nl.stride),
        ("factor", cfg.sampling.factor),
        ("phase_row", cfg.sampling.phase[0]), ("phase_col", cfg.sampling.phase[1]),
    ]
    return [f"{key}={value!r}" if isinstance(value, str) else f"{key}={value}" for key, value in items]


def _evaluate_one(hr_path: Path, cfg: SolverConfig):
    """Decimate a ground-truth image and score both reconstructions."""
    hr = read_image(hr_path)
    f = cfg.sampling.factor
    if hr.shape[0] % f or hr.shape[1] % f:
        raise ValueError(f"{hr_path}: dimensions {hr.shape} not divisible by factor {f}")
    lr = downsample(hr, cfg.sampling)
    baseline = bicubic_upscale(lr, cfg.sampling)
    proposed, _ = interpolate(lr, cfg)
    return psnr(hr, baseline), psnr(hr, proposed)


def _write_csv(path, cfg: SolverConfig, rows: list[tuple[str, str, float]]) -> None:
    lines = [f"# {line}" for line in config_lines(cfg)]
    lines.append("image,method,psnr_db")
    lines.extend(f"{name},{method},{value:.10f}" for name, method, value in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_interpolate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    lr = read_image(args.input)
    hr, history = interpolate(lr, cfg)
    write_image(args.output, hr)
    print(f"{'iter':>4}  {'data_residual':>14}  {'ar_energy':>12}  {'nl_sparsity':>12}")
    for t, stats in enumerate(history, start=1):
        print(f"{t:>4}  {stats.data_residual:>14.6g}  {stats.ar_energy:>12.6g}  "
              f"{stats.nl_sparsity:>12.6g}")
    print(f"wrote {args.output} ({hr.shape[1]}x{hr.shape[0]})")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    path = Path(args.input)
    base, prop = _evaluate_one(path, cfg)
    rows = [(path.stem, "bicubic", base), (path.stem, "proposed", prop)]
    _write_csv(args.output, cfg, rows)
    for name, method, value in rows:
        print(f"{name},{method},{value:.10f}")
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    root = Path(args.input)
    if not root.is_dir():
        raise ValueError(f"{root}: not a directory")
    images = sorted(p for p in root.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not images:
        raise ValueError(f"{root}: no .pgm/.png images found")
    rows = []
    sums = {"bicubic": 0.0, "proposed": 0.0}
    for path in images:
        base, prop = _evaluate_one(path, cfg)
        rows.append((path.stem, "bicubic", base))
        rows.append((path.stem, "proposed", prop))
        sums["bicubic"] += base
        sums["proposed"] += prop
        print(f"{path.stem}: bicubic {base:.4f} dB, proposed {prop:.4f} dB")
    for method in ("bicubic", "proposed"):
        rows.append(("Average", method, sums[method] / len(images)))
    _write_csv(args.output, cfg, rows)
    print(f"Average: bicubic {sums['bicubic'] / len(images):.4f} dB, "
          f"proposed {sums['proposed'] / len(images):.4f} dB")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arnl",
        description="2x grayscale upscaling via local AR + nonlocal sparse regularization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interpolate", help="upscale a low-resolution image 2x")
    p.add_argument("input", help="low-resolution image (PGM P5 or 8-bit PNG)")
    p.add_argument("output", help="output image path (.pgm or .png)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("evaluate", help="decimate a ground truth, reconstruct, write PSNR CSV")
    p.add_argument("input", help="ground-truth image with even dimensions")
    p.add_argument("output", help="output CSV path")
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="evaluate every image in a directory")
    p.add_argument("input", help="directory of ground-truth images")
    p.add_argument("output", help="output CSV path")
    _add_config_flags(p)
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"arnl {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
