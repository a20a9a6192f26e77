"""Binary PPM (P6) and PGM (P5) reading and writing, maxval 255 only.

These formats are lossless and trivially verifiable, which keeps golden
tests bit-exact. Headers may contain '#' comments; the payload must match
the declared dimensions exactly.
"""
from __future__ import annotations

import os

import numpy as np

from etcjpeg.image import ColorImage, ColorSpace, Plane


class PnmError(ValueError):
    """Malformed or unsupported PPM/PGM data."""


def _read_header_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if pos == start:
            raise PnmError("truncated header")
        tokens.append(data[start:pos])
    if pos >= n or not data[pos : pos + 1].isspace():
        raise PnmError("missing whitespace after header")
    return tokens, pos + 1


def _parse_int(token: bytes, name: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise PnmError(f"non-numeric {name} field: {token!r}") from None
    if value <= 0:
        raise PnmError(f"{name} must be positive, got {value}")
    return value


def read_raw(path: str | os.PathLike) -> ColorImage | Plane:
    """Read a binary PPM into an RGB ColorImage or a binary PGM into a Plane."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2:
        raise PnmError("file too short for a PNM header")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise PnmError(f"unsupported magic {magic!r}; expected P5 or P6")
    tokens, payload_start = _read_header_tokens(data, 3, 2)
    width = _parse_int(tokens[0], "width")
    height = _parse_int(tokens[1], "height")
    maxval = _parse_int(tokens[2], "maxval")
    if maxval != 255:
        raise PnmError(f"unsupported maxval {maxval}; only 255 is handled")
    channels = 3 if magic == b"P6" else 1
    expected = width * height * channels
    payload = data[payload_start:]
    if len(payload) < expected:
        raise PnmError(f"truncated payload: need {expected} bytes, have {len(payload)}")
    if len(payload) > expected:
        raise PnmError(f"trailing data after payload: {len(payload) - expected} bytes")
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return Plane(arr.reshape(height, width))
    return ColorImage.from_array(arr.reshape(height, width, 3), ColorSpace.RGB)


def write_raw(image: ColorImage | Plane, path: str | os.PathLike) -> None:
    """Write a ColorImage as binary PPM or a Plane as binary PGM."""
    if isinstance(image, ColorImage):
        header = b"P6\n%d %d\n255\n" % (image.width, image.height)
        payload = image.to_array().tobytes()
    elif isinstance(image, Plane):
        header = b"P5\n%d %d\n255\n" % (image.width, image.height)
        payload = image.samples.tobytes()
    else:
        raise TypeError(f"cannot write {type(image).__name__} as PNM")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
