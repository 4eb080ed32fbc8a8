"""Split-Bregman outer loop for 2x upscaling.

Each iteration alternates four cheap sub-problems: an elementwise
closed-form data/proximity solve for the estimate, a tiled weighted AR
fit-and-predict for the local auxiliary image, a collaborative nonlocal
shrinkage for the sparse auxiliary image, and multiplier-style updates of
the two Bregman variables. The loop runs a fixed iteration count and is
fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ar_local import NeighborLayout, PatchWeightParams, fit_ar_tiled, predict_ar_tiled
from .bicubic import bicubic_upscale
from .image_core import as_image
from .nonlocal3d import BlockMatchParams, collaborative_filter
from .sampling import SamplingSpec, adjoint_upsample, downsample, sample_mask

AXIAL4 = ((-1, 0), (0, -1), (0, 1), (1, 0))


@dataclass(frozen=True)
class ARStageConfig:
    """Settings of the local AR stage.

    For factor-2 grids the stage predicts in two passes, mirroring the
    classic edge-directed ordering: ``layout`` (default diagonal) fills the
    pixel class whose taps land on retained samples, then ``layout2``
    (default axial) fills the remaining classes from the completed quincunx
    lattice. Coefficients are fitted per ``window`` x ``window`` tile.
    """

    layout: NeighborLayout = NeighborLayout()
    layout2: NeighborLayout = NeighborLayout(AXIAL4)
    patch: PatchWeightParams = PatchWeightParams()
    window: int = 5
    ridge: float = 1e-6

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")


@dataclass(frozen=True)
class SolverConfig:
    """All scalar knobs of the reconstruction.

    lam and gamma weigh the local AR and nonlocal sparsity terms of the
    objective (lam = 0 or gamma = 0 switches the stage off); alpha and beta
    are the splitting penalties tying the auxiliary images to the estimate.
    The shrinkage threshold of the nonlocal stage is gamma / (2 * beta).
    """

    lam: float = 0.5
    gamma: float = 1.6
    alpha: float = 0.2
    beta: float = 0.2
    max_iters: int = 10
    literal_init: bool = False
    pin_samples: bool = True
    ar: ARStageConfig = ARStageConfig()
    nl: BlockMatchParams = BlockMatchParams()
    sampling: SamplingSpec = SamplingSpec()

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be > 0")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("lam and gamma must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class IterationStats:
    """Diagnostics of one iteration: the three objective ingredients."""

    data_residual: float
    ar_energy: float
    nl_sparsity: float


@dataclass
class SolverState:
    x: np.ndarray
    g: np.ndarray
    h: np.ndarray
    U: np.ndarray
    V: np.ndarray
    t: int = 0
    history: list[IterationStats] = field(default_factory=list)


def solve_x(y: np.ndarray, g: np.ndarray, h: np.ndarray, U: np.ndarray, V: np.ndarray,
            alpha: float, beta: float, spec: SamplingSpec) -> np.ndarray:
    """Closed-form minimizer of the data + proximity quadratic.

    Because decimation followed by its adjoint is a diagonal 0/1 mask, the
    normal matrix is diagonal: x = r / (1 + alpha + beta) at retained
    coordinates and x = r / (alpha + beta) elsewhere, with
    r = D^T y + alpha (g + U) + beta (h + V).
    """
    if alpha + beta <= 0:
        raise ValueError("alpha + beta must be > 0")
    y = as_image(y)
    g = as_image(g)
    for other in (h, U, V):
        if other.shape != g.shape:
            raise ValueError("auxiliary images must share HR dimensions")
    r = adjoint_upsample(y, spec, g.shape) + alpha * (g + U) + beta * (h + V)
    denom = sample_mask(spec, g.shape) + (alpha + beta)
    return r / denom


def bregman_update(M: np.ndarray, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Multiplier update M - (x - z); used for both Bregman variables."""
    if M.shape != x.shape or x.shape != z.shape:
        raise ValueError("bregman_update requires matching shapes")
    return M - (x - z)


def _ar_predict_stage(c: np.ndarray, sampled: np.ndarray, cfg: SolverConfig):
    """AR-consistent completion of ``c``: retained samples pass through.

    Factor 2 runs the two-pass class schedule; other factors fall back to a
    single whole-image prediction at non-sampled pixels. Returns the
    completed image and the attained weighted fit energy.
    """
    ar = cfg.ar
    factor = cfg.sampling.factor
    if factor == 2:
        pr, pc = cfg.sampling.phase
        diag_class = np.zeros(c.shape, dtype=bool)
        diag_class[(pr + 1) % 2 :: 2, (pc + 1) % 2 :: 2] = True
        w1, phi1 = fit_ar_tiled(c, ar.layout, ar.patch, ar.ridge, ar.window)
        filled = np.where(diag_class, predict_ar_tiled(c, w1, ar.layout, ar.window), c)
        w2, phi2 = fit_ar_tiled(filled, ar.layout2, ar.patch, ar.ridge, ar.window)
        rest = ~sampled & ~diag_class
        return np.where(rest, predict_ar_tiled(filled, w2, ar.layout2, ar.window), filled), phi1 + phi2
    w1, phi1 = fit_ar_tiled(c, ar.layout, ar.patch, ar.ridge, ar.window)
    return np.where(sampled, c, predict_ar_tiled(c, w1, ar.layout, ar.window)), phi1


def interpolate(y: np.ndarray, cfg: SolverConfig = SolverConfig()):
    """Reconstruct the HR image from its decimated observation.

    Returns (hr, history) where hr is clamped to [0, 255] and history holds
    one IterationStats per iteration: the data residual ||y - D x||_2, the
    attained weighted AR energy of the fit, and the post-shrinkage group l1
    of the nonlocal stage.
    """
    y = as_image(y)
    spec = cfg.sampling
    hr_shape = (y.shape[0] * spec.factor, y.shape[1] * spec.factor)
    x0 = bicubic_upscale(y, spec)
    zeros = np.zeros(hr_shape)
    state = SolverState(
        x=x0,
        g=zeros.copy() if cfg.literal_init else x0.copy(),
        h=zeros.copy() if cfg.literal_init else x0.copy(),
        U=zeros.copy(),
        V=zeros.copy(),
    )
    mask = sample_mask(spec, hr_shape) > 0

    while state.t < cfg.max_iters:
        state.t += 1
        x = solve_x(y, state.g, state.h, state.U, state.V, cfg.alpha, cfg.beta, spec)
        if cfg.pin_samples:
            x[mask] = y.ravel()

        if cfg.lam > 0:
            # Proximal step toward AR consistency: blend the class-ordered
            # prediction of the anchor with the anchor itself.
            c = x - state.U
            pred, phi = _ar_predict_stage(c, mask, cfg)
            g = (cfg.lam * pred + cfg.alpha * c) / (cfg.lam + cfg.alpha)
        else:
            # Zero weight: the local stage reduces to its proximity term.
            g = x - state.U
            phi = 0.0

        if cfg.gamma > 0:
            h, psi = collaborative_filter(x - state.V, cfg.gamma / (2.0 * cfg.beta), cfg.nl)
        else:
            h = x - state.V
            psi = 0.0

        state.U = bregman_update(state.U, x, g)
        state.V = bregman_update(state.V, x, h)
        state.x, state.g, state.h = x, g, h
        residual = float(np.linalg.norm(y - downsample(x, spec)))
        state.history.append(IterationStats(residual, phi, psi))

    return np.clip(state.x, 0.0, 255.0), state.history
