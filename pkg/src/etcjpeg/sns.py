"""Deterministic stand-in for image recompression done by SNS providers.

A policy decides whether an uploaded stream is recompressed and at what
quality. Recompression decodes the stream and re-encodes it with the
default tables: three-component streams switch to the policy's chroma
subsampling, single-component streams re-encode with the luminance table
and are therefore immune to chroma subsampling losses.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from etcjpeg.jpeg import JpegConfig, JpegFile, decode, encode, parse_structure
from etcjpeg.jpeg.tables import LUMA_TABLE, scale_table


@dataclass(frozen=True)
class ProviderPolicy:
    """What a provider does to an uploaded JPEG."""

    name: str
    recompress_quality: int
    trigger: str = "always"  # "always" | "quality_above"
    threshold: int = 85
    target_subsampling: str = "420"

    def __post_init__(self):
        if not 1 <= self.recompress_quality <= 100:
            raise ValueError("recompress quality must be in [1, 100]")
        if self.trigger not in ("always", "quality_above"):
            raise ValueError(f"unknown trigger {self.trigger!r}")
        if self.target_subsampling not in ("420", "444"):
            raise ValueError("target subsampling must be '420' or '444'")


TWITTER = ProviderPolicy("twitter", recompress_quality=85, trigger="quality_above", threshold=85)


def facebook_policy(quality: int = 85) -> ProviderPolicy:
    """Recompresses every upload; the exact quality is configurable."""
    return ProviderPolicy("facebook", recompress_quality=quality, trigger="always")


def get_policy(selector: str, facebook_quality: int = 85) -> ProviderPolicy:
    """Resolve a built-in policy name or a policy file path."""
    if selector == "twitter":
        return TWITTER
    if selector == "facebook":
        return facebook_policy(facebook_quality)
    if os.path.exists(selector):
        return load_policy(selector)
    raise ValueError(f"unknown policy {selector!r} (not a preset or a file)")


def load_policy(path: str | os.PathLike) -> ProviderPolicy:
    """Read a key-value policy file (name, quality, trigger, threshold, subsampling)."""
    fields: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed policy line: {line!r}")
            fields[key.strip()] = value.strip()
    if "name" not in fields or "quality" not in fields:
        raise ValueError("policy file must define at least 'name' and 'quality'")
    return ProviderPolicy(
        name=fields["name"],
        recompress_quality=int(fields["quality"]),
        trigger=fields.get("trigger", "always"),
        threshold=int(fields.get("threshold", "85")),
        target_subsampling=fields.get("subsampling", "420"),
    )


def estimate_quality(f: JpegFile | bytes) -> int | None:
    """Quality factor whose scaled default luminance table matches the stream.

    Returns None ("unknown") when the embedded luminance table is not an
    exact scaling of the default table, e.g. for adaptive tables. Among
    multiple exact matches the highest quality wins.
    """
    structure = parse_structure(f)
    embedded = structure.luminance_table.steps
    best: int | None = None
    for quality in range(1, 101):
        if np.array_equal(scale_table(LUMA_TABLE, quality).steps, embedded):
            best = quality
    return best


def _should_recompress(policy: ProviderPolicy, f: JpegFile | bytes) -> bool:
    if policy.trigger == "always":
        return True
    estimate = estimate_quality(f)
    # Unknown tables are treated as high quality: the provider recompresses.
    return estimate is None or estimate > policy.threshold


def simulate_upload(f: JpegFile | bytes, policy: ProviderPolicy) -> JpegFile:
    """Apply one provider pass: either recompress or pass bytes through."""
    jpeg = f if isinstance(f, JpegFile) else JpegFile(f)
    if not _should_recompress(policy, jpeg):
        return jpeg
    decoded = decode(jpeg)
    cfg = JpegConfig(
        quality=policy.recompress_quality,
        subsampling=policy.target_subsampling,
        table="y",
    )
    return encode(decoded.image, cfg)
