import numpy as np
import pytest

from conftest import smooth_plane, smooth_rgb
from oracles import dct2_reference, idct2_reference

from etcjpeg.image import ColorImage, ColorSpace, Plane, rgb_to_ycbcr
from etcjpeg.jpeg import (
    CHROMA_TABLE,
    LUMA_TABLE,
    JpegConfig,
    JpegFile,
    JpegFormatError,
    QuantTable,
    UnsupportedJpegError,
    decode,
    encode,
    parse_structure,
    scale_table,
    subsample_420,
    upsample_420,
)
from etcjpeg.jpeg.dct import fdct, fdct_blocks, idct, idct_blocks
from etcjpeg.metrics import psnr


class TestDct:
    def test_constant_mid_gray_all_zero(self):
        coeffs = fdct(np.zeros((8, 8)))
        assert np.max(np.abs(coeffs)) < 1e-12

    def test_constant_block_dc_only(self):
        for v in (0, 37, 200, 255):
            coeffs = fdct(np.full((8, 8), float(v - 128)))
            assert coeffs[0, 0] == pytest.approx(8.0 * (v - 128), abs=1e-9)
            assert np.max(np.abs(coeffs.reshape(-1)[1:])) < 1e-9

    def test_matches_double_sum_oracle(self, rng):
        for _ in range(50):
            block = rng.uniform(-128, 127, (8, 8))
            ours = fdct(block)
            ref = dct2_reference(block)
            assert np.max(np.abs(ours - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))

    def test_inverse_matches_oracle(self, rng):
        coeffs = rng.uniform(-500, 500, (8, 8))
        assert np.allclose(idct(coeffs), idct2_reference(coeffs), atol=1e-9)

    def test_round_trip(self, rng):
        block = rng.uniform(-128, 127, (8, 8))
        assert np.max(np.abs(idct(fdct(block)) - block)) < 0.01

    def test_block_stack_matches_single(self, rng):
        blocks = rng.uniform(-128, 127, (5, 8, 8))
        stacked = fdct_blocks(blocks)
        for i in range(5):
            assert np.allclose(stacked[i], fdct(blocks[i]), atol=1e-10)
        back = idct_blocks(stacked)
        assert np.allclose(back, blocks, atol=1e-9)


class TestScaleTable:
    def test_quality_50_is_identity(self):
        assert scale_table(LUMA_TABLE, 50) == LUMA_TABLE
        assert scale_table(CHROMA_TABLE, 50) == CHROMA_TABLE

    def test_quality_100_all_ones(self):
        assert np.all(scale_table(LUMA_TABLE, 100).steps == 1)

    def test_hand_computed_entry(self):
        # step 16 at quality 85: scale 200-170=30; (16*30+50)//100 = 5
        table = scale_table(LUMA_TABLE, 85)
        assert table.steps[0, 0] == 5

    def test_low_quality_formula(self):
        # quality 10: scale 500; 16 -> (16*500+50)//100 = 80
        assert scale_table(LUMA_TABLE, 10).steps[0, 0] == 80

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            scale_table(LUMA_TABLE, 0)
        with pytest.raises(ValueError):
            scale_table(LUMA_TABLE, 101)


class TestQuantTable:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuantTable(np.zeros((8, 8), dtype=int))
        with pytest.raises(ValueError):
            QuantTable(np.full((4, 4), 1))

    def test_zigzag_round_trip(self):
        payload = LUMA_TABLE.zigzag_bytes()
        assert len(payload) == 64
        assert payload[0] == 16 and payload[1] == 11 and payload[2] == 12
        assert QuantTable.from_zigzag_bytes(payload) == LUMA_TABLE

    def test_text_round_trip(self):
        assert QuantTable.from_text(CHROMA_TABLE.to_text()) == CHROMA_TABLE


class TestEncoder:
    def test_marker_order(self):
        f = encode(Plane(smooth_plane(16, 16)), JpegConfig(quality=80))
        markers = parse_structure(f).markers
        expected = ["SOI", "DQT", "SOF0", "SOS", "EOI"]
        positions = [markers.index(m) for m in expected]
        assert positions == sorted(positions)

    def test_single_component_stream(self):
        f = encode(Plane(smooth_plane(16, 16)))
        s = parse_structure(f)
        assert len(s.components) == 1
        assert (s.components[0].h, s.components[0].v) == (1, 1)

    def test_embedded_table_is_scaled_choice(self):
        f = encode(Plane(smooth_plane(16, 16)), JpegConfig(quality=73, table="cbcr"))
        s = parse_structure(f)
        assert s.luminance_table == scale_table(CHROMA_TABLE, 73)

    def test_custom_table_embedded(self):
        custom = QuantTable(np.full((8, 8), 24))
        f = encode(Plane(smooth_plane(16, 16)), JpegConfig(quality=50, table=custom))
        assert parse_structure(f).luminance_table == custom

    def test_grayscale_ignores_subsampling(self):
        plane = Plane(smooth_plane(24, 16, seed=3))
        a = encode(plane, JpegConfig(quality=85, subsampling="444"))
        b = encode(plane, JpegConfig(quality=85, subsampling="420"))
        assert a.data == b.data

    def test_color_subsampling_factors(self):
        ycc = rgb_to_ycbcr(ColorImage.from_array(smooth_rgb(32, 16, seed=4)))
        s444 = parse_structure(encode(ycc, JpegConfig(subsampling="444")))
        assert [(c.h, c.v) for c in s444.components] == [(1, 1), (1, 1), (1, 1)]
        s420 = parse_structure(encode(ycc, JpegConfig(subsampling="420")))
        assert [(c.h, c.v) for c in s420.components] == [(2, 2), (1, 1), (1, 1)]

    def test_color_rejects_custom_table(self):
        ycc = rgb_to_ycbcr(ColorImage.from_array(smooth_rgb(16, 16)))
        with pytest.raises(ValueError, match="single-component"):
            encode(ycc, JpegConfig(table="cbcr"))

    def test_minimum_dimensions(self):
        with pytest.raises(ValueError, match="at least 8x8"):
            encode(Plane(np.zeros((4, 16), dtype=np.uint8)))

    def test_layout_mismatch_rejected(self):
        with pytest.raises(ValueError, match="layout"):
            encode(Plane(smooth_plane(16, 16)), JpegConfig(layout="color"))


class TestRoundTrip:
    @pytest.mark.parametrize("size", [(8, 8), (16, 16), (24, 16), (19, 11), (37, 23)])
    def test_own_decoder_any_size(self, size):
        w, h = size
        plane = Plane(smooth_plane(w, h, seed=w * h))
        decoded = decode(encode(plane, JpegConfig(quality=90)))
        assert isinstance(decoded.image, Plane)
        assert (decoded.image.width, decoded.image.height) == (w, h)
        assert psnr(plane, decoded.image) > 30.0

    def test_near_lossless_at_top_quality(self):
        plane = Plane(smooth_plane(64, 48, seed=11))
        decoded = decode(encode(plane, JpegConfig(quality=100)))
        assert psnr(plane, decoded.image) >= 50.0

    def test_quality_95_bound(self):
        plane = Plane(smooth_plane(64, 48, seed=12))
        decoded = decode(encode(plane, JpegConfig(quality=95)))
        assert psnr(plane, decoded.image) >= 40.0

    def test_extracted_table_at_identity_quality(self):
        plane = Plane(smooth_plane(16, 16, seed=13))
        decoded = decode(encode(plane, JpegConfig(quality=50)))
        assert decoded.quant_tables[0] == LUMA_TABLE

    @pytest.mark.parametrize("subsampling", ["444", "420"])
    def test_color_round_trip(self, subsampling):
        ycc = rgb_to_ycbcr(ColorImage.from_array(smooth_rgb(33, 17, seed=14)))
        decoded = decode(encode(ycc, JpegConfig(quality=92, subsampling=subsampling)))
        assert isinstance(decoded.image, ColorImage)
        assert decoded.image.space is ColorSpace.YCBCR
        assert (decoded.image.width, decoded.image.height) == (33, 17)
        assert psnr(ycc, decoded.image) > (32.0 if subsampling == "420" else 38.0)

    def test_psnr_monotone_in_quality(self):
        plane = Plane(smooth_plane(48, 32, seed=15))
        values = [psnr(plane, decode(encode(plane, JpegConfig(quality=q))).image) for q in (70, 80, 90, 100)]
        assert values == sorted(values)

    def test_size_monotone_in_quality(self):
        plane = Plane(smooth_plane(48, 32, seed=16))
        sizes = [len(encode(plane, JpegConfig(quality=q))) for q in (70, 80, 90, 100)]
        for smaller_q, larger_q in zip(sizes, sizes[1:]):
            assert smaller_q <= larger_q * 1.05


class TestDecoderErrors:
    def test_missing_soi(self):
        with pytest.raises(JpegFormatError):
            JpegFile(b"\x00\x01\x02\x03")

    def test_truncated_stream(self):
        f = encode(Plane(smooth_plane(16, 16)))
        with pytest.raises(JpegFormatError):
            parse_structure(f.data[:40] + b"\xff\xd9")

    def test_progressive_rejected(self):
        f = encode(Plane(smooth_plane(16, 16)))
        # rewrite SOF0 (FFC0) into SOF2 (FFC2)
        data = f.data.replace(b"\xff\xc0", b"\xff\xc2", 1)
        with pytest.raises(UnsupportedJpegError, match="non-baseline"):
            parse_structure(data)

    def test_arithmetic_rejected(self):
        f = encode(Plane(smooth_plane(16, 16)))
        data = f.data.replace(b"\xff\xc0", b"\xff\xc9", 1)
        with pytest.raises(UnsupportedJpegError, match="arithmetic"):
            parse_structure(data)

    def test_garbage_after_soi(self):
        with pytest.raises(JpegFormatError):
            parse_structure(b"\xff\xd8\x12\x34\xff\xd9")

    def test_file_save_load(self, tmp_path):
        f = encode(Plane(smooth_plane(16, 16)))
        path = tmp_path / "x.jpg"
        f.save(path)
        assert JpegFile.load(path).data == f.data


class TestSubsampling:
    def test_constant_plane_unchanged(self):
        plane = np.full((6, 10), 77, dtype=np.uint8)
        down = subsample_420(plane)
        assert np.all(down == 77)
        assert np.array_equal(upsample_420(down), np.full((6, 10), 77))

    def test_average_rounds_half_up(self):
        block = np.array([[0, 0], [0, 4]], dtype=np.uint8)
        assert subsample_420(block)[0, 0] == 1
        block = np.array([[0, 0], [0, 2]], dtype=np.uint8)
        assert subsample_420(block)[0, 0] == 1  # 0.5 rounds up

    def test_checkerboard_averages_to_mid(self):
        board = np.indices((8, 8)).sum(axis=0) % 2 * 255
        assert np.all(subsample_420(board.astype(np.uint8)) == 128)

    def test_odd_dimensions_replicate(self):
        plane = np.array([[10, 20, 30]], dtype=np.uint8)
        down = subsample_420(plane)
        assert down.shape == (1, 2)
        assert down[0, 0] == 15 and down[0, 1] == 30

    def test_upsample_replicates(self):
        down = np.array([[1, 2]], dtype=np.uint8)
        up = upsample_420(down)
        assert np.array_equal(up, [[1, 1, 2, 2], [1, 1, 2, 2]])
