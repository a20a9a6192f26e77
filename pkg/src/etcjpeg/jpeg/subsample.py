"""4:2:0 chroma subsampling: plain 2x2 mean down, pixel replication up."""
from __future__ import annotations

import numpy as np


def _pad_even(arr: np.ndarray) -> np.ndarray:
    pad_h = arr.shape[0] % 2
    pad_w = arr.shape[1] % 2
    if pad_h or pad_w:
        arr = np.pad(arr, ((0, pad_h), (0, pad_w)), mode="edge")
    return arr


def subsample_420(samples: np.ndarray) -> np.ndarray:
    """Average each 2x2 neighborhood, rounding half up; odd edges replicate."""
    arr = _pad_even(np.asarray(samples))
    sums = (
        arr[0::2, 0::2].astype(np.uint32)
        + arr[0::2, 1::2]
        + arr[1::2, 0::2]
        + arr[1::2, 1::2]
    )
    return ((sums + 2) // 4).astype(np.uint8)


def upsample_420(samples: np.ndarray) -> np.ndarray:
    """Replicate every sample into a 2x2 neighborhood."""
    arr = np.asarray(samples)
    return np.repeat(np.repeat(arr, 2, axis=0), 2, axis=1)
