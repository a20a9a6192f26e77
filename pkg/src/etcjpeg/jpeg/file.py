"""Container types and errors shared by the encoder and decoder."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from etcjpeg.jpeg.tables import QuantTable

SOI = b"\xff\xd8"
EOI = b"\xff\xd9"


class JpegFormatError(ValueError):
    """Stream violates the baseline JFIF layout this codec handles."""


class UnsupportedJpegError(JpegFormatError):
    """Well-formed stream using a feature outside baseline sequential."""


@dataclass(frozen=True, eq=False)
class JpegFile:
    """A complete JFIF bitstream (SOI ... EOI)."""

    data: bytes

    def __post_init__(self):
        if len(self.data) < 4 or self.data[:2] != SOI or self.data[-2:] != EOI:
            raise JpegFormatError("stream must start with SOI and end with EOI")

    def __len__(self) -> int:
        return len(self.data)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as fh:
            fh.write(self.data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "JpegFile":
        with open(path, "rb") as fh:
            return cls(fh.read())


@dataclass(frozen=True)
class JpegConfig:
    """Encoder settings.

    ``layout`` may be left None to follow the input type (Plane becomes a
    single-component stream, ColorImage a three-component one). ``table``
    selects the quantization table of single-component streams: "y",
    "cbcr", or a custom QuantTable; color streams always use the default
    luminance/chrominance pair. Single-component streams ignore
    ``subsampling``.
    """

    quality: int = 95
    subsampling: str = "444"
    layout: str | None = None
    table: str | QuantTable = "y"

    def __post_init__(self):
        if not 1 <= self.quality <= 100:
            raise ValueError(f"quality must be in [1, 100], got {self.quality}")
        if self.subsampling not in ("444", "420"):
            raise ValueError(f"subsampling must be '444' or '420', got {self.subsampling!r}")
        if self.layout not in (None, "grayscale", "color"):
            raise ValueError(f"layout must be 'grayscale' or 'color', got {self.layout!r}")
        if isinstance(self.table, str) and self.table not in ("y", "cbcr"):
            raise ValueError(f"table must be 'y', 'cbcr', or a QuantTable, got {self.table!r}")


@dataclass
class ComponentInfo:
    """One SOF component entry."""

    component_id: int
    h: int
    v: int
    tq: int


@dataclass
class JpegStructure:
    """Parsed marker-level view of a baseline stream."""

    width: int = 0
    height: int = 0
    precision: int = 8
    components: list[ComponentInfo] = field(default_factory=list)
    quant_tables: dict[int, QuantTable] = field(default_factory=dict)
    huffman: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=dict)
    scan_components: list[tuple[int, int, int]] = field(default_factory=list)
    markers: list[str] = field(default_factory=list)
    entropy_data: bytes = b""

    @property
    def luminance_table(self) -> QuantTable:
        """Quantization table referenced by the first component."""
        if not self.components:
            raise JpegFormatError("no frame header parsed")
        tq = self.components[0].tq
        try:
            return self.quant_tables[tq]
        except KeyError:
            raise JpegFormatError(f"missing quantization table {tq}") from None
