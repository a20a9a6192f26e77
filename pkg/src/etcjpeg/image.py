"""Planar 8-bit images: RGB/YCbCr conversion and three-plane stacking.

A color image is kept as three separate sample planes so that the planes can
be concatenated into a single "grayscale-based" plane (one channel holding
all 3*M*N samples) and split apart again without touching any sample value.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

BIT_DEPTH = 8
SAMPLE_MAX = (1 << BIT_DEPTH) - 1


class ColorSpace(Enum):
    RGB = "rgb"
    YCBCR = "ycbcr"


class Axis(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


def _as_sample_array(samples) -> np.ndarray:
    arr = np.asarray(samples)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("samples must be a non-empty 2-D array")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("samples must be integers")
        if arr.min() < 0 or arr.max() > SAMPLE_MAX:
            raise ValueError(f"samples out of [0, {SAMPLE_MAX}]")
    # Own copy so freezing it never touches a caller's array.
    arr = arr.astype(np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Plane:
    """One 8-bit sample plane, row-major, shape (height, width)."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_sample_array(self.samples))

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def bit_depth(self) -> int:
        return BIT_DEPTH


@dataclass(frozen=True, eq=False)
class ColorImage:
    """Three equally sized planes plus the color space they live in."""

    planes: tuple[Plane, Plane, Plane]
    space: ColorSpace

    def __post_init__(self):
        planes = tuple(self.planes)
        if len(planes) != 3:
            raise ValueError("a color image needs exactly three planes")
        w, h = planes[0].width, planes[0].height
        for p in planes[1:]:
            if p.width != w or p.height != h:
                raise ValueError("all planes must share the same dimensions")
        object.__setattr__(self, "planes", planes)

    @property
    def width(self) -> int:
        return self.planes[0].width

    @property
    def height(self) -> int:
        return self.planes[0].height

    @classmethod
    def from_array(cls, rgb: np.ndarray, space: ColorSpace = ColorSpace.RGB) -> "ColorImage":
        """Build from an interleaved (height, width, 3) array."""
        arr = np.asarray(rgb)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError("expected a (height, width, 3) array")
        return cls(tuple(Plane(arr[:, :, i]) for i in range(3)), space)

    def to_array(self) -> np.ndarray:
        """Interleave the planes into a (height, width, 3) array."""
        return np.stack([p.samples for p in self.planes], axis=2)


@dataclass(frozen=True, eq=False)
class GrayscaleBasedImage:
    """Single-plane image holding all 3*M*N samples of a color image.

    The source planes are concatenated side by side (horizontal axis) or
    stacked top to bottom (vertical axis) in plane order 0, 1, 2.
    """

    plane: Plane
    source_space: ColorSpace
    axis: Axis
    original_width: int
    original_height: int
    encrypted: bool = False

    def __post_init__(self):
        m, n = self.original_width, self.original_height
        if self.axis is Axis.HORIZONTAL:
            expect = (n, 3 * m)
        else:
            expect = (3 * n, m)
        if self.plane.samples.shape != expect:
            raise ValueError(
                f"plane shape {self.plane.samples.shape} does not match "
                f"{self.axis.value} stacking of a {m}x{n} image"
            )

    @property
    def width(self) -> int:
        return self.plane.width

    @property
    def height(self) -> int:
        return self.plane.height


# Full-range BT.601 as used by JFIF. Chroma rows follow from
# Cb = (B - Y) / 1.772 + 128 and Cr = (R - Y) / 1.402 + 128.
_RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.299 / 1.772, -0.587 / 1.772, 0.5],
        [0.5, -0.587 / 1.402, -0.114 / 1.402],
    ]
)
_YCBCR_TO_RGB = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.114 * 1.772 / 0.587, -0.299 * 1.402 / 0.587],
        [1.0, 1.772, 0.0],
    ]
)
_CHROMA_OFFSET = np.array([0.0, 128.0, 128.0])


def _round_half_up_u8(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, SAMPLE_MAX).astype(np.uint8)


def rgb_to_ycbcr(img: ColorImage) -> ColorImage:
    """Convert full-range RGB to full-range YCbCr, rounding half up."""
    if img.space is not ColorSpace.RGB:
        raise ValueError("rgb_to_ycbcr expects an RGB image")
    rgb = img.to_array().astype(np.float64)
    ycc = rgb @ _RGB_TO_YCBCR.T + _CHROMA_OFFSET
    return ColorImage.from_array(_round_half_up_u8(ycc), ColorSpace.YCBCR)


def ycbcr_to_rgb(img: ColorImage) -> ColorImage:
    """Convert full-range YCbCr back to RGB, rounding half up."""
    if img.space is not ColorSpace.YCBCR:
        raise ValueError("ycbcr_to_rgb expects a YCbCr image")
    ycc = img.to_array().astype(np.float64) - _CHROMA_OFFSET
    rgb = ycc @ _YCBCR_TO_RGB.T
    return ColorImage.from_array(_round_half_up_u8(rgb), ColorSpace.RGB)


def assemble(img: ColorImage, axis: Axis = Axis.HORIZONTAL) -> GrayscaleBasedImage:
    """Concatenate the three planes into one grayscale-based plane.

    Samples are copied bit for bit; the plane order is fixed at 0, 1, 2
    left-to-right (horizontal) or top-to-bottom (vertical).
    """
    arrays = [p.samples for p in img.planes]
    joined = np.concatenate(arrays, axis=1 if axis is Axis.HORIZONTAL else 0)
    return GrayscaleBasedImage(
        plane=Plane(joined),
        source_space=img.space,
        axis=axis,
        original_width=img.width,
        original_height=img.height,
    )


def disassemble(g: GrayscaleBasedImage) -> ColorImage:
    """Split a grayscale-based plane back into its three source planes."""
    if g.encrypted:
        raise ValueError("cannot disassemble an encrypted image; decrypt first")
    arr = g.plane.samples
    parts = np.split(arr, 3, axis=1 if g.axis is Axis.HORIZONTAL else 0)
    return ColorImage(tuple(Plane(p) for p in parts), g.source_space)
