"""Weighted local autoregressive modeling.

A pixel is predicted as a fixed linear combination of a small neighbor
layout (default: the four diagonal neighbors). Coefficients are fitted per
training window by weighted least squares, where each equation's weight
measures patch similarity between a pixel and the neighbor it predicts:
brackets of similar texture dominate the fit, so occlusions and outlier
structures are down-weighted instead of corrupting the coefficients.

The classic unweighted pseudoinverse fit is kept as a baseline and as a
cross-check oracle for the weighted path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_core import as_image, box_sum, reflect_index

DIAGONAL4 = ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class NeighborLayout:
    """Fixed lexicographic list of (d_row, d_col) prediction taps."""

    offsets: tuple[tuple[int, int], ...] = DIAGONAL4

    def __post_init__(self):
        if len(self.offsets) < 1:
            raise ValueError("layout needs at least one offset")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError(f"duplicate offsets in layout {self.offsets}")
        if (0, 0) in self.offsets:
            raise ValueError("(0, 0) is not a valid neighbor offset")

    @property
    def order(self) -> int:
        return len(self.offsets)

    @property
    def reach(self) -> int:
        """Largest Chebyshev distance any tap moves."""
        return max(max(abs(dr), abs(dc)) for dr, dc in self.offsets)


@dataclass(frozen=True)
class PatchWeightParams:
    """Patch size and exponential decay rate for similarity weights."""

    patch_size: int = 5
    mu: float = 0.002

    def __post_init__(self):
        if self.patch_size < 3 or self.patch_size % 2 == 0:
            raise ValueError(f"patch_size must be odd and >= 3, got {self.patch_size}")
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")


@dataclass
class ARModel:
    layout: NeighborLayout
    w: np.ndarray
    residual_energy: float
    cond: float | None = None

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.shape != (self.layout.order,):
            raise ValueError(f"coefficient vector shape {self.w.shape} does not match layout order {self.layout.order}")
        if self.residual_energy < 0:
            raise ValueError("residual_energy must be nonnegative")


def _gather(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Read img at (rows, cols) with mirror reflection for out-of-range indices."""
    h, w = img.shape
    return img[reflect_index(rows, h), reflect_index(cols, w)]


def _patch_distance(img: np.ndarray, center: tuple[int, int], offset: tuple[int, int], half: int) -> float:
    """Mean squared difference between the patches at center and center+offset."""
    r, c = center
    pr = np.arange(r - half, r + half + 1)[:, None]
    pc = np.arange(c - half, c + half + 1)[None, :]
    a = _gather(img, pr, pc)
    b = _gather(img, pr + offset[0], pc + offset[1])
    return float(np.mean((a - b) ** 2))


def patch_weights(img: np.ndarray, center: tuple[int, int], layout: NeighborLayout,
                  params: PatchWeightParams) -> np.ndarray:
    """Normalized similarity weights of ``center`` against each layout neighbor.

    theta_k = exp(-mu * d_k) / sum_k exp(-mu * d_k), with d_k the mean squared
    patch difference; nonnegative and summing to one by construction.
    """
    img = as_image(img)
    half = params.patch_size // 2
    d = np.array([_patch_distance(img, center, off, half) for off in layout.offsets])
    e = np.exp(-params.mu * (d - d.min()))  # shift for stability; cancels in the ratio
    return e / e.sum()


def _window_grid(window):
    row0, col0, height, width = window
    if height < 1 or width < 1:
        raise ValueError(f"window {window} is empty")
    rows = np.arange(row0, row0 + height)
    cols = np.arange(col0, col0 + width)
    return np.meshgrid(rows, cols, indexing="ij")


def _window_equations(img, window, layout, params):
    """Stacked WLS equations for one window.

    One equation per (pixel i, tap k): predict the k-th neighbor of i from
    that neighbor's own layout taps. Returns (A, b, theta) with A of shape
    (pixels * order, order). All reads reflect at the borders.
    """
    rr, cc = _window_grid(window)
    n = layout.order
    half = params.patch_size // 2
    a_rows, b_rows, t_rows = [], [], []
    for k, (dr, dc) in enumerate(layout.offsets):
        tr, tc = rr + dr, cc + dc
        b_rows.append(_gather(img, tr, tc).ravel())
        a_rows.append(np.stack(
            [_gather(img, tr + er, tc + ec).ravel() for er, ec in layout.offsets], axis=1))
        d_k = np.empty(rr.size)
        for idx, (r, c) in enumerate(zip(rr.ravel(), cc.ravel())):
            d_k[idx] = _patch_distance(img, (int(r), int(c)), (dr, dc), half)
        t_rows.append(d_k)
    dists = np.stack(t_rows, axis=0)  # (n, pixels)
    e = np.exp(-params.mu * (dists - dists.min(axis=0, keepdims=True)))
    theta = (e / e.sum(axis=0, keepdims=True)).ravel()
    A = np.concatenate(a_rows, axis=0)
    b = np.concatenate(b_rows, axis=0)
    return A, b, theta


def _solve_damped(M, rhs, ridge, window):
    n = M.shape[0]
    trace = float(np.trace(M))
    damp = ridge * (trace / n) if trace > 0 else ridge
    try:
        w = np.linalg.solve(M + damp * np.eye(n), rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular AR normal equations in window {window}") from exc
    if not np.all(np.isfinite(w)):
        raise ValueError(f"non-finite AR solution in window {window}")
    return w, damp


def fit_ar_wls(img: np.ndarray, window, layout: NeighborLayout,
               params: PatchWeightParams, ridge: float = 1e-6) -> ARModel:
    """Fit AR coefficients on one window by similarity-weighted least squares.

    Minimizes sum_i sum_k theta(i,k) (g_i^(k) - sum_j w_j g_{i,k}^(j))^2
    plus Tikhonov damping ``ridge`` scaled by the mean diagonal of the
    weighted normal matrix (so the setting is intensity-scale free).
    """
    img = as_image(img)
    A, b, theta = _window_equations(img, window, layout, params)
    M = (A * theta[:, None]).T @ A
    rhs = (A * theta[:, None]).T @ b
    w, _ = _solve_damped(M, rhs, ridge, window)
    resid = b - A @ w
    return ARModel(layout, w, float(np.sum(theta * resid ** 2)))


def predict_ar(img: np.ndarray, model: ARModel, window) -> np.ndarray:
    """Predicted values over ``window``: each pixel's weighted tap combination."""
    img = as_image(img)
    rr, cc = _window_grid(window)
    pred = np.zeros(rr.shape)
    for w_j, (dr, dc) in zip(model.w, model.layout.offsets):
        pred += w_j * _gather(img, rr + dr, cc + dc)
    return pred


def fit_ar_pinv_baseline(lr_window: np.ndarray, layout: NeighborLayout) -> ARModel:
    """Unweighted minimum-norm least-squares AR fit over a window.

    One equation per usable pixel (a pixel whose taps all stay inside the
    window), predicting the pixel from its own taps. Never raises on rank
    deficiency; the condition number of the design is kept as a diagnostic.
    """
    img = as_image(lr_window)
    h, w_dim = img.shape
    reach = layout.reach
    if h - 2 * reach < 1 or w_dim - 2 * reach < 1 \
            or (h - 2 * reach) * (w_dim - 2 * reach) < layout.order:
        raise ValueError(
            f"window of shape {img.shape} has fewer than {layout.order} usable equations")
    rr, cc = np.meshgrid(np.arange(reach, h - reach), np.arange(reach, w_dim - reach),
                         indexing="ij")
    b = img[rr, cc].ravel()
    A = np.stack([img[rr + dr, cc + dc].ravel() for dr, dc in layout.offsets], axis=1)
    w, _, _, sv = np.linalg.lstsq(A, b, rcond=None)
    resid = b - A @ w
    cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else np.inf
    return ARModel(layout, w, float(np.sum(resid ** 2)), cond=cond)


def local_ar_energy(img: np.ndarray, models: dict, params: PatchWeightParams) -> float:
    """Total weighted AR residual energy over a window -> model map (diagnostic)."""
    img = as_image(img)
    total = 0.0
    for window, model in models.items():
        A, b, theta = _window_equations(img, window, model.layout, params)
        resid = b - A @ model.w
        total += float(np.sum(theta * resid ** 2))
    return total


# ---------------------------------------------------------------------------
# Vectorized tiled path used by the solver loop. Same definitions as the
# per-window ops above (cross-checked in the test suite), but computed for
# every tile of the image at once.
# ---------------------------------------------------------------------------

def _tile_starts(n: int, tile: int) -> np.ndarray:
    return np.arange(0, n, tile)


def patch_weight_field(img: np.ndarray, layout: NeighborLayout,
                       params: PatchWeightParams) -> np.ndarray:
    """Similarity weights at every pixel, shape (order, H, W)."""
    img = as_image(img)
    h, w = img.shape
    half = params.patch_size // 2
    pad = half + layout.reach
    P = np.pad(img, pad, mode="reflect")
    size = params.patch_size
    dists = np.empty((layout.order, h, w))
    lo = pad - half
    for k, (dr, dc) in enumerate(layout.offsets):
        diff = (P[lo : lo + h + 2 * half, lo : lo + w + 2 * half]
                - P[lo + dr : lo + dr + h + 2 * half, lo + dc : lo + dc + w + 2 * half]) ** 2
        dists[k] = box_sum(diff, size) / (size * size)
    e = np.exp(-params.mu * (dists - dists.min(axis=0, keepdims=True)))
    return e / e.sum(axis=0, keepdims=True)


def fit_ar_tiled(img: np.ndarray, layout: NeighborLayout, params: PatchWeightParams,
                 ridge: float = 1e-6, tile: int = 7):
    """Fit one AR model per tile of the image.

    Tiles are ``tile`` x ``tile`` starting at the origin; the last row and
    column of tiles may be smaller. Returns (w_tiles, energy) where w_tiles
    has shape (tile_rows, tile_cols, order) and energy is the attained
    weighted residual summed over all tiles.
    """
    img = as_image(img)
    h, w = img.shape
    n = layout.order
    pad = 2 * layout.reach
    P = np.pad(img, pad, mode="reflect")
    theta = patch_weight_field(img, layout, params)

    # Shifted copies for every distinct tap-sum offset (tap k then tap j).
    offs = layout.offsets
    sums = {}
    for dr, dc in offs:
        for er, ec in offs:
            sums.setdefault((dr + er, dc + ec), None)
    for key in sums:
        dr, dc = key
        sums[key] = P[pad + dr : pad + dr + h, pad + dc : pad + dc + w]
    targets = np.stack([P[pad + dr : pad + dr + h, pad + dc : pad + dc + w] for dr, dc in offs])

    M = np.empty((n, n, h, w))
    rhs = np.empty((n, h, w))
    for j in range(n):
        pj = np.stack([sums[(offs[k][0] + offs[j][0], offs[k][1] + offs[j][1])] for k in range(n)])
        rhs[j] = np.sum(theta * pj * targets, axis=0)
        for l in range(j, n):
            pl = np.stack([sums[(offs[k][0] + offs[l][0], offs[k][1] + offs[l][1])] for k in range(n)])
            M[j, l] = np.sum(theta * pj * pl, axis=0)
            M[l, j] = M[j, l]
    bb = np.sum(theta * targets ** 2, axis=0)

    rows = _tile_starts(h, tile)
    cols = _tile_starts(w, tile)
    M_t = np.add.reduceat(np.add.reduceat(M, rows, axis=-2), cols, axis=-1)
    rhs_t = np.add.reduceat(np.add.reduceat(rhs, rows, axis=-2), cols, axis=-1)
    bb_t = np.add.reduceat(np.add.reduceat(bb, rows, axis=-2), cols, axis=-1)

    tr, tc = len(rows), len(cols)
    M_t = M_t.reshape(n, n, tr * tc).transpose(2, 0, 1)
    rhs_t = rhs_t.reshape(n, tr * tc).T
    trace = np.trace(M_t, axis1=1, axis2=2)
    damp = np.where(trace > 0, ridge * trace / n, ridge)
    M_t = M_t + damp[:, None, None] * np.eye(n)
    try:
        w_t = np.linalg.solve(M_t, rhs_t[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular AR normal equations in tiled fit") from exc

    # Attained weighted loss per tile (ridge term excluded): b'b - 2 w'rhs + w'Mw.
    M_raw = M_t - damp[:, None, None] * np.eye(n)
    quad = np.einsum("ti,tij,tj->t", w_t, M_raw, w_t)
    energy = float(np.sum(np.maximum(bb_t.ravel() - 2 * np.sum(w_t * rhs_t, axis=1) + quad, 0.0)))
    return w_t.reshape(tr, tc, n), energy


def predict_ar_tiled(img: np.ndarray, w_tiles: np.ndarray, layout: NeighborLayout,
                     tile: int = 7) -> np.ndarray:
    """Apply per-tile coefficients at every pixel of the image."""
    img = as_image(img)
    h, w = img.shape
    pad = layout.reach
    P = np.pad(img, pad, mode="reflect")
    rows = _tile_starts(h, tile)
    cols = _tile_starts(w, tile)
    rep_r = np.diff(np.append(rows, h))
    rep_c = np.diff(np.append(cols, w))
    pred = np.zeros((h, w))
    for j, (dr, dc) in enumerate(layout.offsets):
        wj = np.repeat(np.repeat(w_tiles[:, :, j], rep_r, axis=0), rep_c, axis=1)
        pred += wj * P[pad + dr : pad + dr + h, pad + dc : pad + dc + w]
    return pred
