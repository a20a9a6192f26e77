"""Image-adaptive quantization table derived from DCT magnitude statistics.

For a corpus of grayscale-based images, each 8x8 block is level-shifted
and transformed; the mean absolute coefficient at every position is
averaged per image and then (unweighted) across images. The step size at
a position is the ceiling of the DC mean divided by that position's mean,
plus a fixed offset, clamped to [1, 255].
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from etcjpeg.image import Axis, ColorImage, ColorSpace, GrayscaleBasedImage, Plane, assemble, rgb_to_ycbcr
from etcjpeg.jpeg.dct import fdct_blocks, split_plane
from etcjpeg.jpeg.tables import QuantTable
from etcjpeg.pnm import read_raw

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GTableParams:
    """Offset added to every derived step size."""

    epsilon: int = 16

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


@dataclass(frozen=True, eq=False)
class CoeffStats:
    """Absolute-coefficient sums of one image's blocks."""

    abs_sums: np.ndarray  # (8, 8) float64
    block_count: int

    def __post_init__(self):
        arr = np.asarray(self.abs_sums, dtype=np.float64)
        if arr.shape != (8, 8):
            raise ValueError("coefficient sums must be 8x8")
        if arr.min() < 0:
            raise ValueError("coefficient sums must be non-negative")
        if self.block_count < 1:
            raise ValueError("block count must be positive")
        object.__setattr__(self, "abs_sums", arr)

    def mean(self) -> np.ndarray:
        """Per-position mean absolute coefficient of this image."""
        return self.abs_sums / self.block_count


@dataclass(frozen=True, eq=False)
class CorpusStats:
    """Mergeable accumulator over per-image statistics."""

    mean_sums: np.ndarray  # sum of per-image mean matrices
    image_count: int
    block_count: int

    @classmethod
    def from_image(cls, stats: CoeffStats) -> "CorpusStats":
        return cls(stats.mean(), 1, stats.block_count)

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.mean_sums + other.mean_sums,
            self.image_count + other.image_count,
            self.block_count + other.block_count,
        )

    def mean(self) -> np.ndarray:
        """Unweighted across-image mean of per-image means."""
        if self.image_count < 1:
            raise ValueError("empty corpus")
        return self.mean_sums / self.image_count


def image_stats(g: GrayscaleBasedImage | Plane) -> CoeffStats:
    """Per-position mean absolute DCT coefficient over all blocks of one image."""
    plane = g.plane if isinstance(g, GrayscaleBasedImage) else g
    blocks, _, _ = split_plane(plane.samples.astype(np.float64) - 128.0)
    coeffs = fdct_blocks(blocks)
    return CoeffStats(np.abs(coeffs).sum(axis=0), len(blocks))


def aggregate(stats: Sequence[CoeffStats]) -> np.ndarray:
    """Unweighted mean of per-image means; block counts do not weight it."""
    items = list(stats)
    if not items:
        raise ValueError("cannot aggregate an empty corpus")
    acc = CorpusStats.from_image(items[0])
    for s in items[1:]:
        acc = acc.merge(CorpusStats.from_image(s))
    return acc.mean()


def derive_table(cbar: np.ndarray, params: GTableParams = GTableParams()) -> QuantTable:
    """Step size = ceil(DC mean / positional mean) + epsilon, clamped to [1, 255].

    A zero positional mean means the position carries no energy at all; its
    step clamps to 255. A zero DC mean (flat corpus) is rejected.
    """
    cbar = np.asarray(cbar, dtype=np.float64)
    if cbar.shape != (8, 8):
        raise ValueError("mean coefficient matrix must be 8x8")
    dc = cbar[0, 0]
    if dc <= 0.0:
        raise ValueError("flat corpus: DC mean magnitude is zero")
    with np.errstate(divide="ignore"):
        ratios = np.where(cbar > 0.0, dc / np.where(cbar > 0.0, cbar, 1.0), np.inf)
    steps = np.where(np.isfinite(ratios), np.ceil(ratios) + params.epsilon, 255.0)
    return QuantTable(np.clip(steps, 1, 255).astype(np.int64))


def corpus_gtable(
    paths: Iterable[str | os.PathLike],
    params: GTableParams = GTableParams(),
    space: ColorSpace = ColorSpace.YCBCR,
    axis: Axis = Axis.HORIZONTAL,
) -> tuple[QuantTable, dict]:
    """Derive the table from image files; returns (table, stats report).

    PPM files are stacked into grayscale-based images first (converted to
    YCbCr when requested); PGM files are used as-is. Unreadable files and
    images whose stacked plane does not divide into 8x8 blocks are skipped
    with a warning.
    """
    per_image: list[CoeffStats] = []
    used: list[str] = []
    skipped: list[str] = []
    for path in paths:
        name = os.fspath(path)
        try:
            img = read_raw(path)
            if isinstance(img, ColorImage):
                if space is ColorSpace.YCBCR:
                    img = rgb_to_ycbcr(img)
                stats = image_stats(assemble(img, axis))
            else:
                stats = image_stats(img)
        except (OSError, ValueError) as exc:
            logger.warning("skipping %s: %s", name, exc)
            skipped.append(name)
            continue
        per_image.append(stats)
        used.append(name)
    if not per_image:
        raise ValueError("no usable images in corpus")
    cbar = aggregate(per_image)
    table = derive_table(cbar, params)
    report = {
        "image_count": len(per_image),
        "block_count": int(sum(s.block_count for s in per_image)),
        "epsilon": params.epsilon,
        "space": space.value,
        "axis": axis.value,
        "mean_abs_coeffs": [[float(v) for v in row] for row in cbar],
        "skipped": skipped,
    }
    return table, report


def save_report(report: dict, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
