"""Bit-level I/O for entropy-coded JPEG scan data.

The writer stuffs a 0x00 after every emitted 0xFF so scan bytes never
alias a marker; the reader operates on already de-stuffed bytes and keeps
a precomputed 16-bit lookahead for fast Huffman decoding.
"""
from __future__ import annotations

import numpy as np


class BitWriter:
    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            byte = (self._acc >> self._nbits) & 0xFF
            self._out.append(byte)
            if byte == 0xFF:
                self._out.append(0x00)
        self._acc &= (1 << self._nbits) - 1

    def finish(self) -> bytes:
        """Pad the final partial byte with 1 bits and return the stream."""
        if self._nbits:
            pad = 8 - self._nbits
            self.write((1 << pad) - 1, pad)
        return bytes(self._out)


class TruncatedScan(ValueError):
    """Ran out of entropy-coded data mid-decode."""


class BitReader:
    """Sequential bit reader with a 16-bit peek, over de-stuffed scan bytes."""

    def __init__(self, data: bytes):
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        self._nbits = len(bits)
        # 1-padding matches the encoder's final-byte padding.
        ext = np.concatenate([bits, np.ones(16, dtype=np.uint8)]).astype(np.uint32)
        peek = np.zeros(self._nbits + 1, dtype=np.uint32)
        for k in range(16):
            peek |= ext[k : k + self._nbits + 1] << (15 - k)
        self._peek = peek
        self.pos = 0

    def peek16(self) -> int:
        if self.pos > self._nbits:
            raise TruncatedScan("bit stream exhausted")
        return int(self._peek[self.pos])

    def skip(self, nbits: int) -> None:
        self.pos += nbits

    def read(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        if self.pos + nbits > self._nbits:
            raise TruncatedScan("bit stream exhausted")
        value = int(self._peek[self.pos]) >> (16 - nbits)
        self.pos += nbits
        return value
