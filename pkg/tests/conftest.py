from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from etcjpeg.cipher import KeySet
from etcjpeg.image import ColorImage
from etcjpeg.jpeg import QuantTable
from etcjpeg.pnm import read_raw

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def gtable_corpus_paths() -> list[Path]:
    return sorted((DATA_DIR / "corpus20").glob("*.ppm"))


@pytest.fixture(scope="session")
def eval_corpus_paths() -> list[Path]:
    return sorted((DATA_DIR / "eval12").glob("*.ppm"))


@pytest.fixture(scope="session")
def eval_images(eval_corpus_paths) -> list[tuple[str, ColorImage]]:
    return [(p.stem, read_raw(p)) for p in eval_corpus_paths]


@pytest.fixture(scope="session")
def golden_gtable() -> QuantTable:
    return QuantTable.from_text((DATA_DIR / "gtable20_golden.txt").read_text(encoding="ascii"))


@pytest.fixture(scope="session")
def keys() -> KeySet:
    return KeySet.from_file(DATA_DIR / "keys.txt")


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def smooth_plane(width: int, height: int, seed: int = 0) -> np.ndarray:
    """Small smooth gradient/sinusoid plane for codec tests."""
    r = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    field = (
        128.0
        + 55.0 * np.sin(x / 9.0 + r.uniform(0, 6)) * np.cos(y / 7.0 + r.uniform(0, 6))
        + 35.0 * np.sin((x + 2 * y) / 21.0)
        + r.normal(0, 2.0, (height, width))
    )
    return np.clip(np.floor(field + 0.5), 0, 255).astype(np.uint8)


def smooth_rgb(width: int, height: int, seed: int = 0) -> np.ndarray:
    base = smooth_plane(width, height, seed).astype(np.float64)
    r = np.clip(base * 0.9 + 20, 0, 255)
    g = np.clip(base * 0.7 + 45, 0, 255)
    b = np.clip(255 - base * 0.6, 0, 255)
    return np.stack([r, g, b], axis=2).astype(np.uint8)
