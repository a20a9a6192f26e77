"""Baseline sequential JFIF encoder with selectable quantization tables.

The encoder never converts color spaces: it compresses exactly the planes
it is given. Single-component streams carry one quantization table chosen
by the caller; three-component streams use the default luminance table for
component 1 and the default chrominance table for components 2 and 3.
"""
from __future__ import annotations

import struct

import numpy as np

from etcjpeg.image import ColorImage, Plane
from etcjpeg.jpeg import huffman
from etcjpeg.jpeg.bitio import BitWriter
from etcjpeg.jpeg.dct import fdct_blocks, split_plane
from etcjpeg.jpeg.file import JpegConfig, JpegFile
from etcjpeg.jpeg.subsample import subsample_420
from etcjpeg.jpeg.tables import (
    AC_CHROMA_BITS,
    AC_CHROMA_VALUES,
    AC_LUMA_BITS,
    AC_LUMA_VALUES,
    CHROMA_TABLE,
    DC_CHROMA_BITS,
    DC_CHROMA_VALUES,
    DC_LUMA_BITS,
    DC_LUMA_VALUES,
    LUMA_TABLE,
    QuantTable,
    ZIGZAG,
    scale_table,
)

_MARKER_SOI = 0xD8
_MARKER_APP0 = 0xE0
_MARKER_DQT = 0xDB
_MARKER_SOF0 = 0xC0
_MARKER_DHT = 0xC4
_MARKER_SOS = 0xDA
_MARKER_EOI = 0xD9


def _marker(code: int) -> bytes:
    return bytes((0xFF, code))


def _segment(code: int, payload: bytes) -> bytes:
    return _marker(code) + struct.pack(">H", 2 + len(payload)) + payload


def _app0_jfif() -> bytes:
    return _segment(_MARKER_APP0, b"JFIF\x00" + bytes((1, 1, 0)) + struct.pack(">HH", 1, 1) + bytes((0, 0)))


def _dqt(tables: list[tuple[int, QuantTable]]) -> bytes:
    payload = b"".join(bytes((tid,)) + table.zigzag_bytes() for tid, table in tables)
    return _segment(_MARKER_DQT, payload)


def _sof0(width: int, height: int, components: list[tuple[int, int, int, int]]) -> bytes:
    payload = struct.pack(">BHHB", 8, height, width, len(components))
    for cid, h, v, tq in components:
        payload += bytes((cid, (h << 4) | v, tq))
    return _segment(_MARKER_SOF0, payload)


def _dht(tables: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]) -> bytes:
    payload = b""
    for table_class, dest, bits, values in tables:
        payload += bytes(((table_class << 4) | dest,)) + bytes(bits) + bytes(values)
    return _segment(_MARKER_DHT, payload)


def _sos(components: list[tuple[int, int, int]]) -> bytes:
    payload = bytes((len(components),))
    for cid, dc_table, ac_table in components:
        payload += bytes((cid, (dc_table << 4) | ac_table))
    payload += bytes((0, 63, 0))
    return _segment(_MARKER_SOS, payload)


def _pad_to(arr: np.ndarray, height: int, width: int) -> np.ndarray:
    return np.pad(arr, ((0, height - arr.shape[0]), (0, width - arr.shape[1])), mode="edge")


def _quantized_blocks(samples: np.ndarray, table: QuantTable) -> tuple[np.ndarray, int, int]:
    """Level-shift, transform, and quantize; returns zigzagged int blocks."""
    blocks, rows, cols = split_plane(samples.astype(np.float64) - 128.0)
    coeffs = fdct_blocks(blocks)
    ratio = coeffs / table.steps
    quantized = (np.sign(ratio) * np.floor(np.abs(ratio) + 0.5)).astype(np.int32)
    return quantized.reshape(-1, 64)[:, ZIGZAG], rows, cols


class _ComponentPlan:
    def __init__(self, component_id, samples, h, v, tq, table, dc_spec, ac_spec, dc_dest, ac_dest):
        self.component_id = component_id
        self.h = h
        self.v = v
        self.tq = tq
        self.table = table
        self.dc_spec = dc_spec
        self.ac_spec = ac_spec
        self.dc_dest = dc_dest
        self.ac_dest = ac_dest
        self.samples = samples
        self.blocks = None
        self.cols = 0

    def prepare(self, mcus_x: int, mcus_y: int) -> None:
        width = 8 * self.h * mcus_x
        height = 8 * self.v * mcus_y
        padded = _pad_to(self.samples, height, width)
        self.blocks, _, self.cols = _quantized_blocks(padded, self.table)


def _encode_block(writer: BitWriter, zz: np.ndarray, prev_dc: int, dc_map, ac_map) -> int:
    dc = int(zz[0])
    diff = dc - prev_dc
    category = abs(diff).bit_length()
    code, length = dc_map[category]
    writer.write(code, length)
    if category:
        writer.write(diff if diff > 0 else diff + (1 << category) - 1, category)

    nonzero = np.nonzero(zz[1:])[0]
    run_start = 1
    for pos in nonzero:
        k = int(pos) + 1
        run = k - run_start
        while run >= 16:
            code, length = ac_map[0xF0]
            writer.write(code, length)
            run -= 16
        value = int(zz[k])
        category = abs(value).bit_length()
        code, length = ac_map[(run << 4) | category]
        writer.write(code, length)
        writer.write(value if value > 0 else value + (1 << category) - 1, category)
        run_start = k + 1
    if run_start < 64:
        code, length = ac_map[0x00]
        writer.write(code, length)
    return dc


def encode(image: Plane | ColorImage, cfg: JpegConfig = JpegConfig()) -> JpegFile:
    """Compress a Plane or a ColorImage into a baseline JFIF stream."""
    if isinstance(image, Plane):
        layout = "grayscale"
    elif isinstance(image, ColorImage):
        layout = "color"
    else:
        raise TypeError(f"cannot encode {type(image).__name__}")
    if cfg.layout is not None and cfg.layout != layout:
        raise ValueError(f"config layout {cfg.layout!r} does not match input {layout!r}")
    if image.width < 8 or image.height < 8:
        raise ValueError("image dimensions must be at least 8x8")

    if layout == "grayscale":
        base = cfg.table
        if isinstance(base, str):
            base = LUMA_TABLE if base == "y" else CHROMA_TABLE
        table = scale_table(base, cfg.quality)
        plans = [
            _ComponentPlan(1, image.samples, 1, 1, 0, table,
                           (DC_LUMA_BITS, DC_LUMA_VALUES), (AC_LUMA_BITS, AC_LUMA_VALUES), 0, 0)
        ]
        quant_tables = [(0, table)]
        dht_tables = [
            (0, 0, DC_LUMA_BITS, DC_LUMA_VALUES),
            (1, 0, AC_LUMA_BITS, AC_LUMA_VALUES),
        ]
    else:
        if not isinstance(cfg.table, str) or cfg.table != "y":
            raise ValueError("custom tables are only supported for single-component streams")
        luma = scale_table(LUMA_TABLE, cfg.quality)
        chroma = scale_table(CHROMA_TABLE, cfg.quality)
        y, cb, cr = (p.samples for p in image.planes)
        if cfg.subsampling == "420":
            cb, cr = subsample_420(cb), subsample_420(cr)
            y_factors = (2, 2)
        else:
            y_factors = (1, 1)
        plans = [
            _ComponentPlan(1, y, y_factors[0], y_factors[1], 0, luma,
                           (DC_LUMA_BITS, DC_LUMA_VALUES), (AC_LUMA_BITS, AC_LUMA_VALUES), 0, 0),
            _ComponentPlan(2, cb, 1, 1, 1, chroma,
                           (DC_CHROMA_BITS, DC_CHROMA_VALUES), (AC_CHROMA_BITS, AC_CHROMA_VALUES), 1, 1),
            _ComponentPlan(3, cr, 1, 1, 1, chroma,
                           (DC_CHROMA_BITS, DC_CHROMA_VALUES), (AC_CHROMA_BITS, AC_CHROMA_VALUES), 1, 1),
        ]
        quant_tables = [(0, luma), (1, chroma)]
        dht_tables = [
            (0, 0, DC_LUMA_BITS, DC_LUMA_VALUES),
            (1, 0, AC_LUMA_BITS, AC_LUMA_VALUES),
            (0, 1, DC_CHROMA_BITS, DC_CHROMA_VALUES),
            (1, 1, AC_CHROMA_BITS, AC_CHROMA_VALUES),
        ]

    hmax = max(p.h for p in plans)
    vmax = max(p.v for p in plans)
    mcus_x = -(-image.width // (8 * hmax))
    mcus_y = -(-image.height // (8 * vmax))
    for plan in plans:
        plan.prepare(mcus_x, mcus_y)

    writer = BitWriter()
    prev_dc = {p.component_id: 0 for p in plans}
    encode_maps = {
        p.component_id: (huffman.encode_map(*p.dc_spec), huffman.encode_map(*p.ac_spec))
        for p in plans
    }
    for my in range(mcus_y):
        for mx in range(mcus_x):
            for plan in plans:
                dc_map, ac_map = encode_maps[plan.component_id]
                for dy in range(plan.v):
                    row = my * plan.v + dy
                    for dx in range(plan.h):
                        col = mx * plan.h + dx
                        zz = plan.blocks[row * plan.cols + col]
                        prev_dc[plan.component_id] = _encode_block(
                            writer, zz, prev_dc[plan.component_id], dc_map, ac_map
                        )
    scan = writer.finish()

    out = bytearray()
    out += _marker(_MARKER_SOI)
    out += _app0_jfif()
    out += _dqt(quant_tables)
    out += _sof0(image.width, image.height, [(p.component_id, p.h, p.v, p.tq) for p in plans])
    out += _dht(dht_tables)
    out += _sos([(p.component_id, p.dc_dest, p.ac_dest) for p in plans])
    out += scan
    out += _marker(_MARKER_EOI)
    return JpegFile(bytes(out))
