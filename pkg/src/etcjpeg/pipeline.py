"""End-to-end pipelines and the rate-distortion sweep.

A pipeline names one path through the system: optional encryption (with
its source color space), the quantization table for the encrypted stream
or the subsampling mode for the plain baseline, and an optional provider
simulation. Rate is always measured on the uploaded (pre-provider) file;
distortion on the final reconstructed image against the original.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from etcjpeg.cipher import CipherParams, KeySet, decrypt, encrypt
from etcjpeg.image import (
    Axis,
    ColorImage,
    ColorSpace,
    GrayscaleBasedImage,
    Plane,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)
from etcjpeg.jpeg import JpegConfig, QuantTable, decode, encode
from etcjpeg.metrics import bpp, psnr
from etcjpeg.sns import get_policy, simulate_upload

logger = logging.getLogger(__name__)

CSV_HEADER = "image_id,pipeline,quality,bpp,psnr"

_TABLE_NAMES = ("y", "cbcr", "g")


@dataclass(frozen=True)
class Pipeline:
    """One configuration of the encrypt/compress/upload chain."""

    encrypt_space: ColorSpace | None = None  # None = no encryption
    table: str = "y"  # "y" | "cbcr" | "g"; plain pipelines always use defaults
    subsampling: str = "444"  # plain pipelines only
    provider: str | None = None

    @property
    def name(self) -> str:
        if self.encrypt_space is None:
            base = f"plain-{self.subsampling}"
        else:
            base = f"enc-{self.encrypt_space.value}-{self.table}"
        return base if self.provider is None else f"{base}@{self.provider}"

    def __str__(self) -> str:
        return self.name


def parse_pipeline(text: str) -> Pipeline:
    """Parse names like ``plain-420``, ``enc-ycbcr-g``, ``enc-rgb-y@twitter``."""
    base, sep, provider = text.partition("@")
    parts = base.split("-")
    if parts[0] == "plain" and len(parts) == 2 and parts[1] in ("444", "420"):
        return Pipeline(subsampling=parts[1], provider=provider if sep else None)
    if parts[0] == "enc" and len(parts) == 3 and parts[2] in _TABLE_NAMES:
        try:
            space = ColorSpace(parts[1])
        except ValueError:
            raise ValueError(f"unknown color space in pipeline {text!r}") from None
        return Pipeline(encrypt_space=space, table=parts[2], provider=provider if sep else None)
    raise ValueError(f"unknown pipeline {text!r}")


@dataclass(frozen=True)
class RDPoint:
    """One measurement: rate on the uploaded file, fidelity after download."""

    image_id: str
    pipeline: str
    quality: int
    bpp: float
    psnr: float


def run_point(
    image: ColorImage,
    pipeline: Pipeline,
    quality: int,
    keys: KeySet | None = None,
    gtable: QuantTable | None = None,
    axis: Axis = Axis.HORIZONTAL,
    block_size: int = 8,
) -> tuple[float, float]:
    """Run one (image, pipeline, quality) cell; returns (bpp, psnr)."""
    if pipeline.encrypt_space is not None:
        if keys is None:
            raise ValueError("encrypted pipelines need a key set")
        if pipeline.table == "g":
            if gtable is None:
                raise ValueError("pipeline uses the adaptive table but none was supplied")
            table: str | QuantTable = gtable
        else:
            table = pipeline.table
        params = CipherParams(
            source_space=pipeline.encrypt_space,
            axis=axis,
            block_width=block_size,
            block_height=block_size,
        )
        scrambled = encrypt(image, keys, params)
        uploaded = encode(scrambled.plane, JpegConfig(quality=quality, table=table))
        downloaded = uploaded
        if pipeline.provider is not None:
            downloaded = simulate_upload(uploaded, get_policy(pipeline.provider))
        decoded = decode(downloaded)
        if not isinstance(decoded.image, Plane):
            raise ValueError("provider returned a multi-component stream for a grayscale upload")
        received = GrayscaleBasedImage(
            plane=decoded.image,
            source_space=pipeline.encrypt_space,
            axis=axis,
            original_width=image.width,
            original_height=image.height,
            encrypted=True,
        )
        restored: ColorImage = decrypt(received, keys, block_size, block_size)
    else:
        ycc = rgb_to_ycbcr(image)
        uploaded = encode(ycc, JpegConfig(quality=quality, subsampling=pipeline.subsampling))
        downloaded = uploaded
        if pipeline.provider is not None:
            downloaded = simulate_upload(uploaded, get_policy(pipeline.provider))
        decoded = decode(downloaded)
        if not isinstance(decoded.image, ColorImage):
            raise ValueError("expected a three-component stream from the plain pipeline")
        restored = ycbcr_to_rgb(decoded.image)
    return bpp(uploaded, image.width, image.height), psnr(image, restored)


def rd_sweep(
    images: Sequence[tuple[str, ColorImage]],
    pipelines: Sequence[Pipeline],
    qualities: Sequence[int],
    keys: KeySet | None = None,
    gtable: QuantTable | None = None,
    axis: Axis = Axis.HORIZONTAL,
    block_size: int = 8,
) -> list[RDPoint]:
    """Measure every (image, pipeline, quality) cell.

    Failures are logged and skipped so one bad image cannot sink a long
    sweep; the result is sorted by (image_id, pipeline, quality) so two
    identical runs serialize identically.
    """
    points: list[RDPoint] = []
    for image_id, image in images:
        for pipeline in pipelines:
            for quality in qualities:
                try:
                    rate, fidelity = run_point(
                        image, pipeline, quality, keys=keys, gtable=gtable,
                        axis=axis, block_size=block_size,
                    )
                except (ValueError, OSError) as exc:
                    logger.warning("skipping %s/%s/q%d: %s", image_id, pipeline.name, quality, exc)
                    continue
                points.append(RDPoint(image_id, pipeline.name, quality, rate, fidelity))
    points.sort(key=lambda p: (p.image_id, p.pipeline, p.quality))
    return points


def format_csv(points: Iterable[RDPoint]) -> str:
    """Serialize points as CSV (header mandatory, 'inf' for identical images)."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for p in points:
        fidelity = "inf" if math.isinf(p.psnr) else f"{p.psnr:.6f}"
        buf.write(f"{p.image_id},{p.pipeline},{p.quality},{p.bpp:.6f},{fidelity}\n")
    return buf.getvalue()


def mean_rd_curve(points: Sequence[RDPoint], pipeline_name: str, qualities: Sequence[int]) -> list[tuple[int, float, float]]:
    """Corpus-mean (quality, bpp, psnr) triples for one pipeline, by quality."""
    curve = []
    for quality in sorted(qualities):
        cell = [p for p in points if p.pipeline == pipeline_name and p.quality == quality]
        if not cell:
            continue
        curve.append(
            (
                quality,
                sum(p.bpp for p in cell) / len(cell),
                sum(p.psnr for p in cell) / len(cell),
            )
        )
    return curve


def interp_flat(xs: Sequence[float], ys: Sequence[float], x: float) -> float:
    """Piecewise-linear interpolation, flat beyond both ends."""
    pairs = sorted(zip(xs, ys))
    if not pairs:
        raise ValueError("empty curve")
    if x <= pairs[0][0]:
        return pairs[0][1]
    if x >= pairs[-1][0]:
        return pairs[-1][1]
    for (x0, y0), (x1, y1) in zip(pairs, pairs[1:]):
        if x0 <= x <= x1:
            if x1 == x0:
                return y0
            t = (x - x0) / (x1 - x0)
            return y0 + t * (y1 - y0)
    raise AssertionError("unreachable")
