"""Nonlocal 3-D sparse filtering: block matching + collaborative shrinkage.

Blocks similar to a reference block are stacked into a 3-D group, the group
is decorrelated by an orthonormal 3-D transform (2-D Haar wavelet in-plane,
1-D DCT along the stack), its coefficients are soft-thresholded with the
all-lowpass coefficient exempted, and the filtered blocks are scattered
back with per-pixel averaging. Everything is deterministic: candidate ties
break on raster order and aggregation runs in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image_core import as_image, box_sum

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class BlockMatchParams:
    """Block matching and group transform settings.

    epsilon is a mean-squared-difference threshold (intensities in [0,255]);
    levels is the wavelet depth of the in-plane transform, by default the
    full decomposition of an 8x8 block.
    """

    block_size: int = 8
    search_radius: int = 10
    max_group: int = 16
    epsilon: float = 400.0
    stride: int = 4
    levels: int = 3

    def __post_init__(self):
        b = self.block_size
        if b < 2 or (b & (b - 1)) != 0:
            raise ValueError(f"block_size must be a power of two >= 2, got {b}")
        if self.levels < 0 or b % (1 << self.levels):
            raise ValueError(f"block_size {b} not divisible by 2^levels (levels={self.levels})")
        if self.max_group < 1:
            raise ValueError("max_group must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.search_radius < 0:
            raise ValueError("search_radius must be >= 0")


@dataclass
class BlockStack:
    """A matched group: reference position, member positions, stacked pixels."""

    ref_pos: tuple[int, int]
    member_pos: list[tuple[int, int]]
    data: np.ndarray

    def __post_init__(self):
        if not self.member_pos or tuple(self.member_pos[0]) != tuple(self.ref_pos):
            raise ValueError("member_pos must start with ref_pos")
        if self.data.shape[0] != len(self.member_pos):
            raise ValueError("data depth does not match member count")


# ---------------------------------------------------------------------------
# Block matching
# ---------------------------------------------------------------------------

def match_blocks(img: np.ndarray, ref_pos: tuple[int, int], params: BlockMatchParams) -> BlockStack:
    """Group the blocks most similar to the one at ``ref_pos``.

    Candidates are every block position within the search radius that lies
    fully inside the image; distance is the mean squared pixel difference.
    Candidates with distance <= epsilon are kept, truncated to the
    max_group nearest; ties break on raster order of position and the
    reference is always first.
    """
    img = as_image(img)
    h, w = img.shape
    B = params.block_size
    r0, c0 = ref_pos
    if not (0 <= r0 <= h - B and 0 <= c0 <= w - B):
        raise ValueError(f"reference block at {ref_pos} does not fit in image of shape {img.shape}")

    rad = params.search_radius
    rows = np.arange(max(0, r0 - rad), min(h - B, r0 + rad) + 1)
    cols = np.arange(max(0, c0 - rad), min(w - B, c0 + rad) + 1)
    blocks = sliding_window_view(img, (B, B))[np.ix_(rows, cols)]
    ref_block = img[r0 : r0 + B, c0 : c0 + B]
    dist = np.mean((blocks - ref_block) ** 2, axis=(2, 3)).ravel()

    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    rr, cc = rr.ravel(), cc.ravel()
    self_idx = np.flatnonzero((rr == r0) & (cc == c0))[0]
    dist[self_idx] = np.inf  # reference handled explicitly

    order = np.argsort(dist, kind="stable")[: params.max_group - 1]
    order = order[dist[order] <= params.epsilon]
    pos = [(int(r0), int(c0))] + [(int(rr[i]), int(cc[i])) for i in order]
    data = np.stack([img[r : r + B, c : c + B] for r, c in pos])
    return BlockStack((int(r0), int(c0)), pos, data)


def _ref_grid(n: int, block: int, stride: int) -> np.ndarray:
    """Stride grid of block top-lefts, always including the final position."""
    last = n - block
    if last < 0:
        return np.array([], dtype=np.int64)
    grid = list(range(0, last + 1, stride))
    if grid[-1] != last:
        grid.append(last)
    return np.array(grid, dtype=np.int64)


def _match_all(img: np.ndarray, params: BlockMatchParams):
    """Block matching for every stride-grid reference at once.

    Returns (ref_rows, ref_cols, member_du, member_dv, counts): member
    displacement tables of shape (max_group-1, n_refs) sorted by distance
    with raster tie-break, and the total member count per reference
    (including the reference itself).
    """
    h, w = img.shape
    B = params.block_size
    rad = params.search_radius
    R = _ref_grid(h, B, params.stride)
    C = _ref_grid(w, B, params.stride)
    n_refs = R.size * C.size
    if n_refs == 0:
        z = np.zeros((0, 0), dtype=np.int64)
        return np.zeros(0, np.int64), np.zeros(0, np.int64), z, z, np.zeros(0, np.int64)

    disps = [(du, dv) for du in range(-rad, rad + 1) for dv in range(-rad, rad + 1)]
    center = len(disps) // 2  # index of (0, 0); the list is raster-ordered
    dist = np.full((len(disps), R.size, C.size), np.inf)
    # One difference map serves both d(p, p+delta) and d(p, p-delta) =
    # d(p-delta, p), so only the second half of the list is computed.
    for di in range(center + 1, len(disps)):
        du, dv = disps[di]
        a0, a1 = max(0, -du), h - max(0, du)
        b0, b1 = max(0, -dv), w - max(0, dv)
        if a1 - a0 < B or b1 - b0 < B:
            continue
        diff = (img[a0:a1, b0:b1] - img[a0 + du : a1 + du, b0 + dv : b1 + dv]) ** 2
        sums = box_sum(diff, B) / (B * B)
        rsel = (R >= a0) & (R <= a1 - B)
        csel = (C >= b0) & (C <= b1 - B)
        dist[di][np.ix_(rsel, csel)] = sums[np.ix_(R[rsel] - a0, C[csel] - b0)]
        rsel = (R - du >= a0) & (R - du <= a1 - B)
        csel = (C - dv >= b0) & (C - dv <= b1 - B)
        dist[2 * center - di][np.ix_(rsel, csel)] = \
            sums[np.ix_(R[rsel] - du - a0, C[csel] - dv - b0)]

    dist = dist.reshape(len(disps), n_refs)
    # Displacements are enumerated in raster order, so a stable sort on
    # distance realizes the raster tie-break on absolute position.
    order = np.argsort(dist, axis=0, kind="stable")[: params.max_group - 1]
    dsel = np.take_along_axis(dist, order, axis=0)
    kept = dsel <= params.epsilon
    counts = 1 + kept.sum(axis=0)

    du = np.array([d[0] for d in disps], dtype=np.int64)
    dv = np.array([d[1] for d in disps], dtype=np.int64)
    rr, cc = np.meshgrid(R, C, indexing="ij")
    return rr.ravel(), cc.ravel(), du[order], dv[order], counts.astype(np.int64)


# ---------------------------------------------------------------------------
# Orthonormal transforms
# ---------------------------------------------------------------------------

def _haar_axis(a: np.ndarray, axis: int, inverse: bool = False) -> np.ndarray:
    a = np.moveaxis(a, axis, -1)
    if inverse:
        s = a.shape[-1] // 2
        low, high = a[..., :s], a[..., s:]
        out = np.empty_like(a)
        out[..., 0::2] = (low + high) / _SQRT2
        out[..., 1::2] = (low - high) / _SQRT2
    else:
        even, odd = a[..., 0::2], a[..., 1::2]
        out = np.concatenate([even + odd, even - odd], axis=-1) / _SQRT2
    return np.moveaxis(out, -1, axis)


def _check_dwt_size(shape, levels):
    b0, b1 = shape[-2], shape[-1]
    if b0 != b1:
        raise ValueError(f"expected square blocks, got {b0}x{b1}")
    if levels < 0 or (levels and b0 % (1 << levels)):
        raise ValueError(f"block size {b0} not divisible by 2^{levels}")


def dwt2_forward(block: np.ndarray, levels: int) -> np.ndarray:
    """Orthonormal 2-D Haar analysis on the last two axes, recursing on the
    low-low band ``levels`` times."""
    x = np.array(block, dtype=np.float64)
    _check_dwt_size(x.shape, levels)
    size = x.shape[-1]
    for lev in range(levels):
        s = size >> lev
        sub = x[..., :s, :s]
        sub = _haar_axis(sub, -1)
        sub = _haar_axis(sub, -2)
        x[..., :s, :s] = sub
    return x


def dwt2_inverse(coeffs: np.ndarray, levels: int) -> np.ndarray:
    x = np.array(coeffs, dtype=np.float64)
    _check_dwt_size(x.shape, levels)
    size = x.shape[-1]
    for lev in reversed(range(levels)):
        s = size >> lev
        sub = x[..., :s, :s]
        sub = _haar_axis(sub, -2, inverse=True)
        sub = _haar_axis(sub, -1, inverse=True)
        x[..., :s, :s] = sub
    return x


_DCT_CACHE: dict[int, np.ndarray] = {}


def _dct_matrix(k: int) -> np.ndarray:
    m = _DCT_CACHE.get(k)
    if m is None:
        n = np.arange(k)
        m = np.cos(np.pi * (2 * n[None, :] + 1) * n[:, None] / (2 * k)) * np.sqrt(2.0 / k)
        m[0] = np.sqrt(1.0 / k)
        _DCT_CACHE[k] = m
    return m


_DWT_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _dwt_flat_matrix(block_size: int, levels: int) -> np.ndarray:
    """The 2-D wavelet as one orthogonal (B^2, B^2) matrix on flat blocks.

    Built by transforming the canonical basis, so it is exactly the linear
    map of :func:`dwt2_forward`; one batched matmul then replaces the
    per-level butterflies on large block collections.
    """
    key = (block_size, levels)
    m = _DWT_CACHE.get(key)
    if m is None:
        basis = np.eye(block_size * block_size).reshape(-1, block_size, block_size)
        m = dwt2_forward(basis, levels).reshape(-1, block_size * block_size).T
        _DWT_CACHE[key] = m
    return m


def dct1_forward(v: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II of a 1-D vector (any length)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("expected a non-empty 1-D vector")
    return _dct_matrix(v.size) @ v


def dct1_inverse(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1 or c.size < 1:
        raise ValueError("expected a non-empty 1-D vector")
    return _dct_matrix(c.size).T @ c


def _stack_data(stack) -> np.ndarray:
    data = stack.data if isinstance(stack, BlockStack) else stack
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 3:
        raise ValueError(f"expected (depth, B, B) stack data, got shape {data.shape}")
    return data


def transform3d_forward(stack, levels: int = 3) -> np.ndarray:
    """2-D Haar per block then DCT-II along the stack axis; orthonormal."""
    data = _stack_data(stack)
    co = dwt2_forward(data, levels)
    return np.einsum("ab,bij->aij", _dct_matrix(data.shape[0]), co)


def transform3d_inverse(coeffs: np.ndarray, levels: int = 3) -> np.ndarray:
    co = _stack_data(coeffs)
    co = np.einsum("ab,bij->aij", _dct_matrix(co.shape[0]).T, co)
    return dwt2_inverse(co, levels)


def soft_threshold(coeffs, tau: float, keep_dc: bool = False):
    """Elementwise sign(v) * max(|v| - tau, 0).

    With keep_dc the all-lowpass coefficient (index 0 on every axis) passes
    through unchanged, preserving the group mean.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    c = np.asarray(coeffs, dtype=np.float64)
    out = np.sign(c) * np.maximum(np.abs(c) - tau, 0.0)
    if keep_dc:
        out[(0,) * out.ndim] = c[(0,) * out.ndim]
    return float(out) if np.isscalar(coeffs) else out


# ---------------------------------------------------------------------------
# Group filtering
# ---------------------------------------------------------------------------

def _filter_groups(img: np.ndarray, tau, params: BlockMatchParams):
    """Collaborative filtering pass over all stride-grid groups.

    Returns (numerator, counts, l1_total): per-pixel sums of filtered block
    values, per-pixel contribution counts, and the total l1 norm of the
    (thresholded, if tau is not None) transform coefficients. ``tau=None``
    skips shrinkage, which turns the pass into a sparsity measurement.
    """
    h, w = img.shape
    B = params.block_size
    ref_r, ref_c, du, dv, counts = _match_all(img, params)
    num = np.zeros(h * w)
    cnt = np.zeros(h * w)
    l1_total = 0.0
    if ref_r.size == 0:
        return num.reshape(h, w), cnt.reshape(h, w), l1_total

    blocks = sliding_window_view(img, (B, B))
    cell = np.arange(B)
    wave = _dwt_flat_matrix(B, params.levels)
    for m in np.unique(counts):
        sel = np.flatnonzero(counts == m)
        rows = ref_r[sel][None, :]
        cols = ref_c[sel][None, :]
        if m > 1:
            rows = np.concatenate([rows, rows + du[: m - 1, sel]], axis=0)
            cols = np.concatenate([cols, cols + dv[: m - 1, sel]], axis=0)
        data = blocks[rows.T, cols.T].reshape(sel.size, m, B * B)
        dct = _dct_matrix(int(m))
        # in-plane wavelet then member-axis DCT, both as batched matmuls
        co = np.swapaxes(data @ wave.T, 1, 2) @ dct.T  # (n_sel, B*B, m)
        if tau is not None:
            sh = np.sign(co) * np.maximum(np.abs(co) - tau, 0.0)
            sh[:, 0, 0] = co[:, 0, 0]  # all-lowpass coefficient exempt
        else:
            sh = co
        l1_total += float(np.sum(np.abs(sh)))
        if tau is not None:
            back = (np.swapaxes(sh @ dct, 1, 2) @ wave).reshape(sel.size, m, B, B)
            flat_pos = (rows.T[:, :, None, None] + cell[None, None, :, None]) * w \
                + (cols.T[:, :, None, None] + cell[None, None, None, :])
            num += np.bincount(flat_pos.ravel(), weights=back.ravel(), minlength=h * w)
            cnt += np.bincount(flat_pos.ravel(), minlength=h * w)
    return num.reshape(h, w), cnt.reshape(h, w), l1_total


def nonlocal_energy(img: np.ndarray, params: BlockMatchParams) -> float:
    """Sum over stride-grid groups of the l1 norm of their 3-D transform."""
    img = as_image(img)
    _, _, l1_total = _filter_groups(img, None, params)
    return l1_total


def collaborative_filter(img: np.ndarray, tau: float, params: BlockMatchParams):
    """Shrink every group by ``tau`` and average the scattered blocks.

    Pixels covered by no block pass through unchanged. Also returns the
    post-shrinkage l1 total as a sparsity diagnostic.
    """
    img = as_image(img)
    if tau == 0:
        return img.copy(), nonlocal_energy(img, params)
    num, cnt, l1_total = _filter_groups(img, tau, params)
    out = np.where(cnt > 0, num / np.maximum(cnt, 1), img)
    return out, l1_total


def solve_h_subproblem(c: np.ndarray, beta: float, gamma: float,
                       params: BlockMatchParams) -> np.ndarray:
    """Approximate proximal step for the nonlocal sparsity term.

    Solves min_h  gamma * (group sparsity of h) + beta * ||c - h||^2 one
    group at a time: shrink each group's 3-D transform by gamma/(2*beta)
    and average the overlapping reconstructions.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    c = as_image(c)
    if gamma == 0:
        return c.copy()
    out, _ = collaborative_filter(c, gamma / (2.0 * beta), params)
    return out
