"""Canonical Huffman code construction for baseline JPEG tables."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_CODE_LENGTH = 16


def _assign_codes(bits: tuple[int, ...], values: tuple[int, ...]):
    """Yield (symbol, code, length) triples in canonical order."""
    if len(bits) != MAX_CODE_LENGTH:
        raise ValueError("BITS must list counts for code lengths 1..16")
    if sum(bits) != len(values):
        raise ValueError("BITS counts do not match the number of symbols")
    code = 0
    idx = 0
    for length in range(1, MAX_CODE_LENGTH + 1):
        for _ in range(bits[length - 1]):
            if code >= (1 << length):
                raise ValueError("over-subscribed Huffman table")
            yield values[idx], code, length
            idx += 1
            code += 1
        code <<= 1


@lru_cache(maxsize=None)
def encode_map(bits: tuple[int, ...], values: tuple[int, ...]) -> dict[int, tuple[int, int]]:
    """symbol -> (code, length)."""
    return {sym: (code, length) for sym, code, length in _assign_codes(bits, values)}


@lru_cache(maxsize=None)
def decode_tables(bits: tuple[int, ...], values: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """16-bit-prefix lookup: (symbol[65536], code_length[65536]).

    A length of 0 marks a prefix that matches no code.
    """
    symbols = np.zeros(1 << MAX_CODE_LENGTH, dtype=np.int16)
    lengths = np.zeros(1 << MAX_CODE_LENGTH, dtype=np.uint8)
    for sym, code, length in _assign_codes(bits, values):
        lo = code << (MAX_CODE_LENGTH - length)
        hi = (code + 1) << (MAX_CODE_LENGTH - length)
        symbols[lo:hi] = sym
        lengths[lo:hi] = length
    return symbols, lengths
