"""Key-driven block scrambling of grayscale-based images.

Encryption stacks the three color planes into one plane, cuts it into
Bx x By blocks, then applies three keyed, independently seeded steps:
a block permutation, a per-block rotation/flip, and a per-block
negative-positive (bitwise complement) transform. Every step is a
bijection on sample values, so decryption is exact.
"""
from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass

import numpy as np

from etcjpeg.image import (
    Axis,
    ColorImage,
    ColorSpace,
    GrayscaleBasedImage,
    Plane,
    assemble,
    disassemble,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)

# One rotation/flip draw carries 3 bits (8 states), one complement draw 1 bit.
TRANSFORM_STATES = 8

_PERMUTE_TAG = "block-permutation"
_TRANSFORM_TAG = "block-rotation-flip"
_NEGPOS_TAG = "block-negative-positive"


@dataclass(frozen=True)
class KeySet:
    """Three independent secret keys, one per scrambling step."""

    k1: bytes
    k2: bytes
    k3: bytes

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            value = getattr(self, name)
            if not isinstance(value, bytes) or len(value) == 0:
                raise ValueError(f"{name} must be a non-empty byte string")

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "KeySet":
        """Parse a key file with lines ``k1=<hex>``, ``k2=<hex>``, ``k3=<hex>``."""
        fields: dict[str, bytes] = {}
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                m = re.fullmatch(r"(k[123])\s*=\s*([0-9a-fA-F]+)", line)
                if not m:
                    raise ValueError(f"malformed key line: {line!r}")
                fields[m.group(1)] = bytes.fromhex(m.group(2))
        missing = {"k1", "k2", "k3"} - fields.keys()
        if missing:
            raise ValueError(f"key file missing {sorted(missing)}")
        return cls(fields["k1"], fields["k2"], fields["k3"])

    def to_file(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii") as fh:
            for name in ("k1", "k2", "k3"):
                fh.write(f"{name}={getattr(self, name).hex()}\n")


class KeyedStream:
    """Deterministic pseudorandom stream derived from (key, domain tag).

    Built from SHA-256 in counter mode, so identical inputs yield an
    identical stream on every platform. The tag decorrelates the three
    key usages even if the same bytes were reused across keys.
    """

    def __init__(self, key: bytes, tag: str):
        if not key:
            raise ValueError("empty key")
        prefix = len(key).to_bytes(4, "big") + key + tag.encode("utf-8")
        self._seed = hashlib.sha256(prefix).digest()
        self._counter = 0
        self._acc = 0
        self._acc_bits = 0

    def _refill(self) -> None:
        block = hashlib.sha256(self._seed + self._counter.to_bytes(8, "big")).digest()
        self._counter += 1
        self._acc = (self._acc << 256) | int.from_bytes(block, "big")
        self._acc_bits += 256

    def bits(self, n: int) -> int:
        """Next n bits as an unsigned integer."""
        if n < 0:
            raise ValueError("bit count must be non-negative")
        while self._acc_bits < n:
            self._refill()
        self._acc_bits -= n
        value = self._acc >> self._acc_bits
        self._acc &= (1 << self._acc_bits) - 1
        return value

    def bit(self) -> int:
        return self.bits(1)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (unbiased)."""
        if n < 1:
            raise ValueError("range must be at least 1")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            value = self.bits(k)
            if value < n:
                return value

    def permutation(self, count: int) -> np.ndarray:
        """Fisher-Yates shuffle of range(count)."""
        order = np.arange(count, dtype=np.int64)
        for i in range(count - 1, 0, -1):
            j = self.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


@dataclass(frozen=True)
class BlockGrid:
    """Non-overlapping block layout of an Mg x Ng plane."""

    bx: int
    by: int
    cols: int
    rows: int

    @property
    def nb(self) -> int:
        return self.cols * self.rows


def make_grid(mg: int, ng: int, bx: int, by: int) -> BlockGrid:
    """Divide an Mg x Ng plane into Bx x By blocks.

    Dimensions that are not exact multiples of the block size are
    rejected: a residual margin would stay unscrambled, which silently
    weakens the cipher.
    """
    if bx < 1 or by < 1:
        raise ValueError("block size must be at least 1")
    if mg % bx != 0 or ng % by != 0:
        raise ValueError(
            f"plane {mg}x{ng} is not divisible by block size {bx}x{by}"
        )
    return BlockGrid(bx=bx, by=by, cols=mg // bx, rows=ng // by)


def split_blocks(samples: np.ndarray, grid: BlockGrid) -> np.ndarray:
    """View an (Ng, Mg) array as (nb, By, Bx) blocks in row-major order."""
    h, w = samples.shape
    blocks = samples.reshape(grid.rows, grid.by, grid.cols, grid.bx)
    return blocks.transpose(0, 2, 1, 3).reshape(grid.nb, grid.by, grid.bx)


def join_blocks(blocks: np.ndarray, grid: BlockGrid) -> np.ndarray:
    """Inverse of split_blocks."""
    stacked = blocks.reshape(grid.rows, grid.cols, grid.by, grid.bx)
    return stacked.transpose(0, 2, 1, 3).reshape(grid.rows * grid.by, grid.cols * grid.bx)


def _permutation_for(key: bytes, nb: int) -> np.ndarray:
    return KeyedStream(key, _PERMUTE_TAG).permutation(nb)


def permute_blocks(blocks: np.ndarray, k1: bytes) -> np.ndarray:
    """Reorder blocks by the keyed permutation; content is untouched."""
    return blocks[_permutation_for(k1, len(blocks))]


def inverse_permute_blocks(blocks: np.ndarray, k1: bytes) -> np.ndarray:
    perm = _permutation_for(k1, len(blocks))
    out = np.empty_like(blocks)
    out[perm] = blocks
    return out


def _transform_codes(key: bytes, nb: int) -> np.ndarray:
    stream = KeyedStream(key, _TRANSFORM_TAG)
    return np.array([stream.randbelow(TRANSFORM_STATES) for _ in range(nb)], dtype=np.int64)


def apply_transform(block: np.ndarray, code: int) -> np.ndarray:
    """One of 8 states: clockwise quarter turns, then an optional mirror."""
    rot = code & 3
    out = np.rot90(block, k=-rot)
    if code >= 4:
        out = out[:, ::-1]
    return np.ascontiguousarray(out)


def invert_transform(block: np.ndarray, code: int) -> np.ndarray:
    rot = code & 3
    out = block[:, ::-1] if code >= 4 else block
    return np.ascontiguousarray(np.rot90(out, k=rot))


def _apply_codes(blocks: np.ndarray, codes: np.ndarray, inverse: bool) -> np.ndarray:
    if blocks.shape[1] != blocks.shape[2] and np.any(codes & 1):
        raise ValueError("quarter-turn rotation requires square blocks")
    out = np.empty_like(blocks)
    for code in range(TRANSFORM_STATES):
        idx = np.nonzero(codes == code)[0]
        if idx.size == 0:
            continue
        group = blocks[idx]
        if inverse:
            if code >= 4:
                group = group[:, :, ::-1]
            group = np.rot90(group, k=code & 3, axes=(1, 2))
        else:
            group = np.rot90(group, k=-(code & 3), axes=(1, 2))
            if code >= 4:
                group = group[:, :, ::-1]
        out[idx] = group
    return out


def transform_blocks(blocks: np.ndarray, k2: bytes) -> np.ndarray:
    """Rotate/flip each block by an independent uniform draw from the key stream."""
    codes = _transform_codes(k2, len(blocks))
    return _apply_codes(blocks, codes, inverse=False)


def inverse_transform_blocks(blocks: np.ndarray, k2: bytes) -> np.ndarray:
    codes = _transform_codes(k2, len(blocks))
    return _apply_codes(blocks, codes, inverse=True)


def negpos_blocks(blocks: np.ndarray, k3: bytes) -> np.ndarray:
    """Complement every pixel of block i when the i-th key bit is 1.

    Applying the same key twice is the identity, so this is its own inverse.
    """
    stream = KeyedStream(k3, _NEGPOS_TAG)
    mask = np.array([stream.bit() for _ in range(len(blocks))], dtype=bool)
    out = blocks.copy()
    out[mask] ^= np.uint8(0xFF)
    return out


@dataclass(frozen=True)
class CipherParams:
    """Choices the two ends must agree on (also stored in the sidecar)."""

    source_space: ColorSpace = ColorSpace.RGB
    axis: Axis = Axis.HORIZONTAL
    block_width: int = 8
    block_height: int = 8


def encrypt(img: ColorImage, keys: KeySet, params: CipherParams = CipherParams()) -> GrayscaleBasedImage:
    """Scramble a full-color RGB image into an encrypted grayscale-based image.

    With ``source_space=YCBCR`` the planes are converted before stacking;
    that costs up to +-2 per sample on the decrypt round trip (rounding),
    while the RGB path is bit-exact.
    """
    if img.space is not ColorSpace.RGB:
        raise ValueError("encrypt expects an RGB source image")
    work = rgb_to_ycbcr(img) if params.source_space is ColorSpace.YCBCR else img
    g = assemble(work, params.axis)
    grid = make_grid(g.width, g.height, params.block_width, params.block_height)
    blocks = split_blocks(g.plane.samples, grid)
    blocks = permute_blocks(blocks, keys.k1)
    blocks = transform_blocks(blocks, keys.k2)
    blocks = negpos_blocks(blocks, keys.k3)
    return GrayscaleBasedImage(
        plane=Plane(join_blocks(blocks, grid)),
        source_space=params.source_space,
        axis=params.axis,
        original_width=img.width,
        original_height=img.height,
        encrypted=True,
    )


def decrypt(
    g: GrayscaleBasedImage,
    keys: KeySet,
    block_width: int = 8,
    block_height: int = 8,
) -> ColorImage:
    """Invert the scrambling steps and restore the RGB image.

    A wrong key or mismatched grid is undetectable and simply produces
    garbage output; there is no integrity check by design.
    """
    if not g.encrypted:
        raise ValueError("image is not marked as encrypted")
    grid = make_grid(g.width, g.height, block_width, block_height)
    blocks = split_blocks(g.plane.samples, grid)
    blocks = negpos_blocks(blocks, keys.k3)
    blocks = inverse_transform_blocks(blocks, keys.k2)
    blocks = inverse_permute_blocks(blocks, keys.k1)
    plain = GrayscaleBasedImage(
        plane=Plane(join_blocks(blocks, grid)),
        source_space=g.source_space,
        axis=g.axis,
        original_width=g.original_width,
        original_height=g.original_height,
        encrypted=False,
    )
    color = disassemble(plain)
    if g.source_space is ColorSpace.YCBCR:
        color = ycbcr_to_rgb(color)
    return color


def key_space_bits(nb: int) -> float:
    """Size of the key space in bits for an nb-block image.

    Counts log2(nb!) permutations, 3 bits of rotation/flip state per
    block, and 1 complement bit per block.
    """
    if nb < 1:
        raise ValueError("block count must be at least 1")
    return math.lgamma(nb + 1) / math.log(2) + 4.0 * nb


# Sidecar metadata carried next to an encrypted PGM file.

def write_sidecar(path: str | os.PathLike, g: GrayscaleBasedImage, params: CipherParams) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"axis={g.axis.value}\n")
        fh.write(f"space={g.source_space.value}\n")
        fh.write(f"width={g.original_width}\n")
        fh.write(f"height={g.original_height}\n")
        fh.write(f"bx={params.block_width}\n")
        fh.write(f"by={params.block_height}\n")


def load_sidecar(path: str | os.PathLike) -> tuple[CipherParams, int, int]:
    """Read a sidecar file; returns (params, original_width, original_height)."""
    fields: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed sidecar line: {line!r}")
            fields[key.strip()] = value.strip()
    required = {"axis", "space", "width", "height", "bx", "by"}
    missing = required - fields.keys()
    if missing:
        raise ValueError(f"sidecar missing fields {sorted(missing)}")
    params = CipherParams(
        source_space=ColorSpace(fields["space"]),
        axis=Axis(fields["axis"]),
        block_width=int(fields["bx"]),
        block_height=int(fields["by"]),
    )
    return params, int(fields["width"]), int(fields["height"])
