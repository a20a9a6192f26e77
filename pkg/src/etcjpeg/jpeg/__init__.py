"""Self-contained baseline JFIF codec with selectable quantization tables."""

from etcjpeg.jpeg.decoder import DecodedJpeg, decode, parse_structure
from etcjpeg.jpeg.dct import fdct, fdct_blocks, idct, idct_blocks
from etcjpeg.jpeg.encoder import encode
from etcjpeg.jpeg.file import (
    JpegConfig,
    JpegFile,
    JpegFormatError,
    JpegStructure,
    UnsupportedJpegError,
)
from etcjpeg.jpeg.subsample import subsample_420, upsample_420
from etcjpeg.jpeg.tables import CHROMA_TABLE, LUMA_TABLE, QuantTable, scale_table

__all__ = [
    "CHROMA_TABLE",
    "DecodedJpeg",
    "JpegConfig",
    "JpegFile",
    "JpegFormatError",
    "JpegStructure",
    "LUMA_TABLE",
    "QuantTable",
    "UnsupportedJpegError",
    "decode",
    "encode",
    "fdct",
    "fdct_blocks",
    "idct",
    "idct_blocks",
    "parse_structure",
    "scale_table",
    "subsample_420",
    "upsample_420",
]
