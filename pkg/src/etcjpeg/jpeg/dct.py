"""8x8 type-II DCT with the normalization used by baseline JPEG.

The forward transform of a constant block of value v yields DC = 8*v and
zero AC; the transform pair is orthonormal, so idct(fdct(x)) == x up to
floating-point roundoff.
"""
from __future__ import annotations

import numpy as np

BLOCK = 8


def _basis() -> np.ndarray:
    u = np.arange(BLOCK).reshape(-1, 1)
    x = np.arange(BLOCK).reshape(1, -1)
    mat = 0.5 * np.cos((2 * x + 1) * u * np.pi / (2 * BLOCK))
    mat[0, :] *= 1.0 / np.sqrt(2.0)
    return mat


_T = _basis()


def fdct(block: np.ndarray) -> np.ndarray:
    """Forward DCT of one 8x8 block of level-shifted samples."""
    arr = np.asarray(block, dtype=np.float64)
    if arr.shape != (BLOCK, BLOCK):
        raise ValueError("fdct expects an 8x8 block")
    return _T @ arr @ _T.T


def idct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse DCT of one 8x8 coefficient block."""
    arr = np.asarray(coeffs, dtype=np.float64)
    if arr.shape != (BLOCK, BLOCK):
        raise ValueError("idct expects an 8x8 block")
    return _T.T @ arr @ _T


def fdct_blocks(blocks: np.ndarray) -> np.ndarray:
    """Forward DCT of a stack shaped (n, 8, 8)."""
    return np.einsum("ux,nxy,vy->nuv", _T, np.asarray(blocks, dtype=np.float64), _T, optimize=True)


def idct_blocks(coeffs: np.ndarray) -> np.ndarray:
    """Inverse DCT of a stack shaped (n, 8, 8)."""
    return np.einsum("ux,nuv,vy->nxy", _T, np.asarray(coeffs, dtype=np.float64), _T, optimize=True)


def split_plane(samples: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Cut an (H, W) array, H and W multiples of 8, into (n, 8, 8) blocks."""
    h, w = samples.shape
    if h % BLOCK or w % BLOCK:
        raise ValueError(f"plane {w}x{h} is not divisible into 8x8 blocks")
    rows, cols = h // BLOCK, w // BLOCK
    blocks = samples.reshape(rows, BLOCK, cols, BLOCK).transpose(0, 2, 1, 3)
    return blocks.reshape(rows * cols, BLOCK, BLOCK), rows, cols


def join_plane(blocks: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of split_plane."""
    stacked = blocks.reshape(rows, cols, BLOCK, BLOCK).transpose(0, 2, 1, 3)
    return stacked.reshape(rows * BLOCK, cols * BLOCK)
