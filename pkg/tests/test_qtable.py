import logging

import numpy as np
import pytest

from conftest import smooth_plane
from oracles import dct2_reference

from etcjpeg.image import ColorImage, ColorSpace, Plane, assemble, rgb_to_ycbcr
from etcjpeg.pnm import write_raw
from etcjpeg.qtable import (
    CoeffStats,
    CorpusStats,
    GTableParams,
    aggregate,
    corpus_gtable,
    derive_table,
    image_stats,
    save_report,
)


def _plane_stats(arr):
    return image_stats(Plane(np.asarray(arr, dtype=np.uint8)))


class TestImageStats:
    def test_constant_mid_gray_is_zero(self):
        stats = _plane_stats(np.full((16, 16), 128))
        assert np.max(stats.mean()) == 0.0
        assert stats.block_count == 4

    def test_identical_blocks_equal_block_magnitudes(self, rng):
        block = rng.integers(0, 256, (8, 8))
        tiled = np.tile(block, (3, 2))
        expected = np.abs(dct2_reference(block.astype(np.float64) - 128.0))
        assert np.allclose(_plane_stats(tiled).mean(), expected, atol=1e-9)

    def test_two_block_oracle(self, rng):
        arr = rng.integers(0, 256, (8, 16))
        left = np.abs(dct2_reference(arr[:, :8].astype(np.float64) - 128.0))
        right = np.abs(dct2_reference(arr[:, 8:].astype(np.float64) - 128.0))
        assert np.allclose(_plane_stats(arr).mean(), (left + right) / 2.0, atol=1e-9)

    def test_requires_divisible_dimensions(self):
        with pytest.raises(ValueError, match="divisible"):
            _plane_stats(np.zeros((12, 16)))

    def test_accepts_grayscale_based_image(self, rng):
        arr = rng.integers(0, 256, (16, 8, 3), dtype=np.uint8)
        g = assemble(ColorImage.from_array(arr))
        assert image_stats(g).block_count == 6

    def test_invariant_under_block_aligned_translation(self, rng):
        arr = rng.integers(0, 256, (24, 32), dtype=np.uint8)
        base = _plane_stats(arr).mean()
        rolled = np.roll(np.roll(arr, 8, axis=0), 16, axis=1)
        assert np.allclose(_plane_stats(rolled).mean(), base, rtol=1e-12)


class TestAggregate:
    def test_single_image_passthrough(self, rng):
        stats = _plane_stats(rng.integers(0, 256, (16, 16)))
        assert np.array_equal(aggregate([stats]), stats.mean())

    def test_two_images_elementwise_mean(self):
        a = CoeffStats(np.full((8, 8), 2.0), 1)
        b = CoeffStats(np.full((8, 8), 6.0), 2)  # per-image mean 3.0
        assert np.allclose(aggregate([a, b]), 2.5)

    def test_order_independence(self, rng):
        stats = [_plane_stats(rng.integers(0, 256, (8, 8))) for _ in range(5)]
        forward = aggregate(stats)
        assert np.allclose(aggregate(stats[::-1]), forward, rtol=1e-12)

    def test_unweighted_by_block_count(self):
        small = CoeffStats(np.full((8, 8), 10.0), 1)
        big = CoeffStats(np.full((8, 8), 2000.0), 1000)  # per-image mean 2.0
        assert np.allclose(aggregate([small, big]), 6.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_merge_associative(self, rng):
        stats = [CorpusStats.from_image(_plane_stats(rng.integers(0, 256, (16, 16)))) for _ in range(6)]
        left = stats[0]
        for s in stats[1:]:
            left = left.merge(s)
        pair = stats[0].merge(stats[1]).merge(stats[2].merge(stats[3])).merge(stats[4].merge(stats[5]))
        assert np.allclose(left.mean(), pair.mean(), rtol=1e-12)
        assert left.image_count == pair.image_count == 6


class TestDeriveTable:
    def test_flat_ratio_gives_offset_plus_one(self):
        table = derive_table(np.full((8, 8), 3.7))
        assert np.all(table.steps == 17)

    def test_dc_entry_always_offset_plus_one(self, rng):
        cbar = rng.uniform(0.5, 50.0, (8, 8))
        cbar[0, 0] = np.max(cbar)  # keep DC dominant, as in image statistics
        assert derive_table(cbar).steps[0, 0] == 17

    def test_zero_position_clamps_high(self):
        cbar = np.full((8, 8), 4.0)
        cbar[7, 7] = 0.0
        assert derive_table(cbar).steps[7, 7] == 255

    def test_flat_corpus_rejected(self):
        with pytest.raises(ValueError, match="flat"):
            derive_table(np.zeros((8, 8)))

    def test_epsilon_configurable(self):
        table = derive_table(np.full((8, 8), 2.0), GTableParams(epsilon=4))
        assert np.all(table.steps == 5)
        with pytest.raises(ValueError):
            GTableParams(epsilon=-1)

    def test_clamped_to_255(self):
        cbar = np.full((8, 8), 1e-6)
        cbar[0, 0] = 1000.0
        table = derive_table(cbar)
        assert table.steps[0, 0] == 17
        assert np.all(table.steps.reshape(-1)[1:] == 255)


class TestCorpusGtable:
    def test_single_image_equals_direct_derivation(self, tmp_path, rng):
        arr = rng.integers(0, 256, (16, 8, 3), dtype=np.uint8)
        path = tmp_path / "one.ppm"
        write_raw(ColorImage.from_array(arr), path)
        table, report = corpus_gtable([path])
        direct = derive_table(image_stats(assemble(rgb_to_ycbcr(ColorImage.from_array(arr)))).mean())
        assert table == direct
        assert report["image_count"] == 1

    def test_constant_corpus_rejected(self, tmp_path):
        path = tmp_path / "flat.ppm"
        write_raw(ColorImage.from_array(np.full((8, 8, 3), 128, dtype=np.uint8)), path)
        with pytest.raises(ValueError, match="flat"):
            corpus_gtable([path])

    def test_bad_images_skipped_with_warning(self, tmp_path, rng, caplog):
        good = tmp_path / "good.ppm"
        write_raw(ColorImage.from_array(rng.integers(0, 256, (16, 8, 3), dtype=np.uint8)), good)
        undersized = tmp_path / "small.ppm"
        write_raw(ColorImage.from_array(rng.integers(0, 256, (4, 4, 3), dtype=np.uint8)), undersized)
        broken = tmp_path / "broken.ppm"
        broken.write_bytes(b"P6 garbage")
        with caplog.at_level(logging.WARNING):
            table, report = corpus_gtable([good, undersized, broken])
        assert report["image_count"] == 1
        assert sorted(report["skipped"]) == sorted([str(undersized), str(broken)])
        assert len(caplog.records) == 2

    def test_empty_corpus_rejected(self, tmp_path):
        broken = tmp_path / "broken.ppm"
        broken.write_bytes(b"nope")
        with pytest.raises(ValueError, match="no usable"):
            corpus_gtable([broken])

    def test_rgb_space_option(self, tmp_path, rng):
        arr = rng.integers(0, 256, (16, 8, 3), dtype=np.uint8)
        path = tmp_path / "img.ppm"
        write_raw(ColorImage.from_array(arr), path)
        rgb_table, _ = corpus_gtable([path], space=ColorSpace.RGB)
        direct = derive_table(image_stats(assemble(ColorImage.from_array(arr))).mean())
        assert rgb_table == direct

    def test_pgm_corpus_used_directly(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_raw(Plane(smooth_plane(32, 16, seed=21)), path)
        table, report = corpus_gtable([path])
        assert report["block_count"] == 8
        assert table.steps[0, 0] == 17

    def test_golden_subset_reproduced_exactly(self, gtable_corpus_paths, golden_gtable):
        table, report = corpus_gtable(gtable_corpus_paths)
        assert table == golden_gtable
        assert report["image_count"] == 20

    def test_structure_on_natural_corpus(self, golden_gtable):
        steps = golden_gtable.steps
        assert steps.min() >= 17
        assert all(np.diff(steps[0]) >= 0)

    def test_report_serializes(self, tmp_path, rng):
        path = tmp_path / "img.ppm"
        write_raw(ColorImage.from_array(rng.integers(0, 256, (16, 8, 3), dtype=np.uint8)), path)
        _, report = corpus_gtable([path])
        out = tmp_path / "stats.json"
        save_report(report, out)
        import json

        loaded = json.loads(out.read_text())
        assert loaded["image_count"] == 1
        assert len(loaded["mean_abs_coeffs"]) == 8
