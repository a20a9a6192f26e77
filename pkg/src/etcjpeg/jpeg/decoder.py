"""Baseline sequential JFIF decoder.

Handles single-component and three-component interleaved scans with
sampling factors 1 or 2 per axis, 8-bit quantization tables, and the
standard byte-stuffing rules. Progressive modes, arithmetic coding, and
restart markers are rejected with a structured error.
"""
from __future__ import annotations

import struct

import numpy as np

from etcjpeg.image import ColorImage, ColorSpace, Plane
from etcjpeg.jpeg import huffman
from etcjpeg.jpeg.bitio import BitReader, TruncatedScan
from etcjpeg.jpeg.dct import idct_blocks, join_plane
from etcjpeg.jpeg.file import (
    ComponentInfo,
    JpegFile,
    JpegFormatError,
    JpegStructure,
    UnsupportedJpegError,
)
from etcjpeg.jpeg.tables import QuantTable, ZIGZAG

_MARKER_NAMES = {
    0xC0: "SOF0", 0xC1: "SOF1", 0xC2: "SOF2", 0xC3: "SOF3",
    0xC4: "DHT", 0xC5: "SOF5", 0xC6: "SOF6", 0xC7: "SOF7",
    0xC9: "SOF9", 0xCA: "SOF10", 0xCB: "SOF11", 0xCC: "DAC",
    0xCD: "SOF13", 0xCE: "SOF14", 0xCF: "SOF15",
    0xD8: "SOI", 0xD9: "EOI", 0xDA: "SOS", 0xDB: "DQT",
    0xDC: "DNL", 0xDD: "DRI", 0xFE: "COM",
}
_MARKER_NAMES.update({0xD0 + i: f"RST{i}" for i in range(8)})
_MARKER_NAMES.update({0xE0 + i: f"APP{i}" for i in range(16)})

_UNSUPPORTED_SOF = {0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF}


def _marker_name(code: int) -> str:
    return _MARKER_NAMES.get(code, f"0x{code:02X}")


def _segment_payload(data: bytes, pos: int) -> tuple[bytes, int]:
    if pos + 2 > len(data):
        raise JpegFormatError("truncated segment header")
    length = struct.unpack(">H", data[pos : pos + 2])[0]
    if length < 2 or pos + length > len(data):
        raise JpegFormatError("truncated segment payload")
    return data[pos + 2 : pos + length], pos + length


def _parse_dqt(payload: bytes, structure: JpegStructure) -> None:
    pos = 0
    while pos < len(payload):
        pq = payload[pos] >> 4
        tq = payload[pos] & 0x0F
        if pq != 0:
            raise UnsupportedJpegError("16-bit quantization tables are not supported")
        if pos + 65 > len(payload):
            raise JpegFormatError("truncated quantization table")
        structure.quant_tables[tq] = QuantTable.from_zigzag_bytes(payload[pos + 1 : pos + 65])
        pos += 65


def _parse_sof0(payload: bytes, structure: JpegStructure) -> None:
    if len(payload) < 6:
        raise JpegFormatError("truncated frame header")
    precision, height, width, count = struct.unpack(">BHHB", payload[:6])
    if precision != 8:
        raise UnsupportedJpegError(f"{precision}-bit precision is not supported")
    if len(payload) != 6 + 3 * count:
        raise JpegFormatError("frame header length mismatch")
    structure.precision = precision
    structure.width = width
    structure.height = height
    for i in range(count):
        cid, factors, tq = payload[6 + 3 * i : 9 + 3 * i]
        structure.components.append(ComponentInfo(cid, factors >> 4, factors & 0x0F, tq))


def _parse_dht(payload: bytes, structure: JpegStructure) -> None:
    pos = 0
    while pos < len(payload):
        table_class = payload[pos] >> 4
        dest = payload[pos] & 0x0F
        if pos + 17 > len(payload):
            raise JpegFormatError("truncated Huffman table")
        bits = tuple(payload[pos + 1 : pos + 17])
        count = sum(bits)
        if pos + 17 + count > len(payload):
            raise JpegFormatError("truncated Huffman table values")
        values = tuple(payload[pos + 17 : pos + 17 + count])
        structure.huffman[(table_class, dest)] = (bits, values)
        pos += 17 + count


def _find_scan_end(data: bytes, pos: int) -> int:
    """Index of the first real marker after the entropy-coded bytes."""
    while True:
        idx = data.find(b"\xff", pos)
        if idx < 0 or idx + 1 >= len(data):
            raise JpegFormatError("scan data ran past end of stream")
        nxt = data[idx + 1]
        if nxt == 0x00:
            pos = idx + 2
            continue
        if 0xD0 <= nxt <= 0xD7:
            raise UnsupportedJpegError("restart markers are not supported")
        return idx


def parse_structure(data: bytes | JpegFile) -> JpegStructure:
    """Parse markers, tables, and headers without decoding the scan."""
    if isinstance(data, JpegFile):
        data = data.data
    if len(data) < 4 or data[:2] != b"\xff\xd8":
        raise JpegFormatError("missing SOI marker")
    structure = JpegStructure()
    structure.markers.append("SOI")
    pos = 2
    while True:
        if pos + 2 > len(data):
            raise JpegFormatError("stream ended without EOI")
        if data[pos] != 0xFF:
            raise JpegFormatError(f"expected marker at offset {pos}")
        while data[pos + 1] == 0xFF:  # optional fill bytes before a marker
            pos += 1
            if pos + 2 > len(data):
                raise JpegFormatError("stream ended without EOI")
        code = data[pos + 1]
        name = _marker_name(code)
        structure.markers.append(name)
        pos += 2
        if code == 0xD9:
            return structure
        if code in _UNSUPPORTED_SOF or code == 0xCC:
            kind = "arithmetic coding" if code in (0xC9, 0xCA, 0xCB, 0xCC) else "non-baseline frame"
            raise UnsupportedJpegError(f"{kind} ({name}) is not supported")
        payload, pos = _segment_payload(data, pos)
        if code == 0xDB:
            _parse_dqt(payload, structure)
        elif code == 0xC0:
            if structure.components:
                raise JpegFormatError("multiple frame headers")
            _parse_sof0(payload, structure)
        elif code == 0xC4:
            _parse_dht(payload, structure)
        elif code == 0xDD:
            if struct.unpack(">H", payload)[0] != 0:
                raise UnsupportedJpegError("restart intervals are not supported")
        elif code == 0xDA:
            if not structure.components:
                raise JpegFormatError("scan before frame header")
            count = payload[0]
            if len(payload) != 1 + 2 * count + 3:
                raise JpegFormatError("scan header length mismatch")
            if count != len(structure.components):
                raise UnsupportedJpegError("non-interleaved scans are not supported")
            for i in range(count):
                cs = payload[1 + 2 * i]
                tables = payload[2 + 2 * i]
                structure.scan_components.append((cs, tables >> 4, tables & 0x0F))
            end = _find_scan_end(data, pos)
            structure.entropy_data = data[pos:end].replace(b"\xff\x00", b"\xff")
            pos = end
        # APPn / COM / DNL payloads are skipped.


def _extend(value: int, category: int) -> int:
    if category == 0:
        return 0
    if value < (1 << (category - 1)):
        return value - (1 << category) + 1
    return value


class _Decoded:
    """Result of a full decode: image plus what the stream embedded."""

    def __init__(self, image: Plane | ColorImage, quant_tables: dict[int, QuantTable], structure: JpegStructure):
        self.image = image
        self.quant_tables = quant_tables
        self.structure = structure


DecodedJpeg = _Decoded


def _decode_component_blocks(reader, plans, mcus_x, mcus_y):
    prev_dc = {p["cid"]: 0 for p in plans}
    try:
        for my in range(mcus_y):
            for mx in range(mcus_x):
                for plan in plans:
                    dc_sym, dc_len = plan["dc_lut"]
                    ac_sym, ac_len = plan["ac_lut"]
                    for dy in range(plan["v"]):
                        row = my * plan["v"] + dy
                        for dx in range(plan["h"]):
                            col = mx * plan["h"] + dx
                            zz = plan["blocks"][row * plan["cols"] + col]
                            prefix = reader.peek16()
                            length = int(dc_len[prefix])
                            if length == 0:
                                raise JpegFormatError("invalid DC Huffman code")
                            reader.skip(length)
                            category = int(dc_sym[prefix])
                            diff = _extend(reader.read(category), category)
                            prev_dc[plan["cid"]] += diff
                            zz[0] = prev_dc[plan["cid"]]
                            k = 1
                            while k < 64:
                                prefix = reader.peek16()
                                length = int(ac_len[prefix])
                                if length == 0:
                                    raise JpegFormatError("invalid AC Huffman code")
                                reader.skip(length)
                                rs = int(ac_sym[prefix])
                                run, size = rs >> 4, rs & 0x0F
                                if size == 0:
                                    if run == 15:
                                        k += 16
                                        continue
                                    if run == 0:
                                        break
                                    raise JpegFormatError("invalid AC run/size symbol")
                                k += run
                                if k > 63:
                                    raise JpegFormatError("AC coefficient index overflow")
                                zz[k] = _extend(reader.read(size), size)
                                k += 1
    except TruncatedScan as exc:
        raise JpegFormatError(str(exc)) from None


def decode(data: bytes | JpegFile) -> _Decoded:
    """Decode a baseline stream into a Plane or a YCbCr ColorImage.

    Three-component images are returned in YCbCr; callers that want RGB
    convert explicitly. The embedded quantization tables are surfaced for
    inspection (quality estimation, forensics).
    """
    structure = parse_structure(data)
    if not structure.components:
        raise JpegFormatError("stream contains no frame header")
    if not structure.scan_components:
        raise JpegFormatError("stream contains no scan")
    if len(structure.components) not in (1, 3):
        raise UnsupportedJpegError(f"{len(structure.components)}-component streams are not supported")

    hmax = max(c.h for c in structure.components)
    vmax = max(c.v for c in structure.components)
    if hmax not in (1, 2) or vmax not in (1, 2):
        raise UnsupportedJpegError("sampling factors above 2 are not supported")
    mcus_x = -(-structure.width // (8 * hmax))
    mcus_y = -(-structure.height // (8 * vmax))

    plans = []
    scan_by_id = {cs: (td, ta) for cs, td, ta in structure.scan_components}
    for comp in structure.components:
        if comp.component_id not in scan_by_id:
            raise JpegFormatError(f"component {comp.component_id} missing from scan")
        td, ta = scan_by_id[comp.component_id]
        if (0, td) not in structure.huffman or (1, ta) not in structure.huffman:
            raise JpegFormatError("scan references undefined Huffman tables")
        if comp.tq not in structure.quant_tables:
            raise JpegFormatError(f"missing quantization table {comp.tq}")
        cols = comp.h * mcus_x
        rows = comp.v * mcus_y
        plans.append(
            {
                "cid": comp.component_id,
                "h": comp.h,
                "v": comp.v,
                "cols": cols,
                "rows": rows,
                "table": structure.quant_tables[comp.tq],
                "dc_lut": huffman.decode_tables(*structure.huffman[(0, td)]),
                "ac_lut": huffman.decode_tables(*structure.huffman[(1, ta)]),
                "blocks": np.zeros((cols * rows, 64), dtype=np.int32),
            }
        )

    reader = BitReader(structure.entropy_data)
    _decode_component_blocks(reader, plans, mcus_x, mcus_y)

    planes = []
    for plan in plans:
        natural = np.zeros((len(plan["blocks"]), 64), dtype=np.float64)
        natural[:, ZIGZAG] = plan["blocks"]
        coeffs = natural.reshape(-1, 8, 8) * plan["table"].steps
        samples = idct_blocks(coeffs) + 128.0
        full = join_plane(samples, plan["rows"], plan["cols"])
        sx, sy = hmax // plan["h"], vmax // plan["v"]
        if sx > 1 or sy > 1:
            full = np.repeat(np.repeat(full, sy, axis=0), sx, axis=1)
        full = full[: structure.height, : structure.width]
        planes.append(np.clip(np.round(full), 0, 255).astype(np.uint8))

    if len(planes) == 1:
        image: Plane | ColorImage = Plane(planes[0])
    else:
        image = ColorImage(tuple(Plane(p) for p in planes), ColorSpace.YCBCR)
    return _Decoded(image, dict(structure.quant_tables), structure)
