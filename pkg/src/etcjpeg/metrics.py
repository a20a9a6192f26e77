"""Fidelity and rate metrics for the evaluation harness."""
from __future__ import annotations

import math

import numpy as np

from etcjpeg.image import ColorImage, Plane
from etcjpeg.jpeg import JpegFile

PSNR_INFINITE = math.inf


def _samples(image: ColorImage | Plane) -> np.ndarray:
    if isinstance(image, ColorImage):
        return image.to_array()
    return image.samples


def psnr(a: ColorImage | Plane, b: ColorImage | Plane) -> float:
    """Peak signal-to-noise ratio in dB, pooled over all samples.

    For color images the MSE pools all three planes into one denominator.
    Identical inputs return math.inf.
    """
    sa, sb = _samples(a), _samples(b)
    if sa.shape != sb.shape:
        raise ValueError(f"dimension mismatch: {sa.shape} vs {sb.shape}")
    diff = sa.astype(np.float64) - sb.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_INFINITE
    return 10.0 * math.log10(255.0 * 255.0 / mse)


def bpp(f: JpegFile | bytes | int, width: int, height: int) -> float:
    """Bits per pixel of the original image.

    The denominator is always the original color image's pixel count
    (width x height), not the tripled sample count of a grayscale-based
    stream; that keeps encrypted and plain files on one rate axis.
    """
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    if isinstance(f, JpegFile):
        size = len(f.data)
    elif isinstance(f, (bytes, bytearray)):
        size = len(f)
    else:
        size = int(f)
    return 8.0 * size / (width * height)
