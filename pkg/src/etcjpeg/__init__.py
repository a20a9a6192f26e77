"""Grayscale-based block-scrambling encryption for JPEG workflows.

The package bundles five layers: planar image handling (image, pnm), the
block-scrambling cipher (cipher), a self-contained baseline JPEG codec
(jpeg), an adaptive quantization-table generator (qtable), a provider
recompression simulator (sns), and the measurement harness (metrics,
pipeline, cli).
"""

from etcjpeg.cipher import (
    BlockGrid,
    CipherParams,
    KeyedStream,
    KeySet,
    decrypt,
    encrypt,
    key_space_bits,
    make_grid,
)
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
from etcjpeg.jpeg import (
    CHROMA_TABLE,
    LUMA_TABLE,
    JpegConfig,
    JpegFile,
    QuantTable,
    decode,
    encode,
    scale_table,
)
from etcjpeg.metrics import bpp, psnr
from etcjpeg.pipeline import Pipeline, RDPoint, rd_sweep
from etcjpeg.pnm import read_raw, write_raw
from etcjpeg.qtable import GTableParams, aggregate, corpus_gtable, derive_table, image_stats
from etcjpeg.sns import TWITTER, ProviderPolicy, estimate_quality, facebook_policy, simulate_upload

__version__ = "0.1.0"
