import numpy as np
import pytest

from etcjpeg.image import ColorImage, Plane
from etcjpeg.pnm import PnmError, read_raw, write_raw


def test_ppm_round_trip(tmp_path, rng):
    arr = rng.integers(0, 256, (13, 7, 3), dtype=np.uint8)
    path = tmp_path / "img.ppm"
    write_raw(ColorImage.from_array(arr), path)
    back = read_raw(path)
    assert isinstance(back, ColorImage)
    assert np.array_equal(back.to_array(), arr)


def test_pgm_round_trip(tmp_path, rng):
    arr = rng.integers(0, 256, (5, 9), dtype=np.uint8)
    path = tmp_path / "img.pgm"
    write_raw(Plane(arr), path)
    back = read_raw(path)
    assert isinstance(back, Plane)
    assert np.array_equal(back.samples, arr)


def test_minimal_pgm_header(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_bytes(b"P5 2 2 255 " + bytes([1, 2, 3, 4]))
    plane = read_raw(path)
    assert plane.samples.shape == (2, 2)
    assert plane.samples[1, 1] == 4


def test_comments_in_header(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 1\n# another\n255\n" + bytes([9, 8]))
    plane = read_raw(path)
    assert list(plane.samples[0]) == [9, 8]


@pytest.mark.parametrize(
    "payload, message",
    [
        (b"P4 2 2 255 " + bytes(4), "magic"),
        (b"P6 2 2 65535 " + bytes(24), "maxval"),
        (b"P5 2 x 255 " + bytes(4), "non-numeric"),
        (b"P5 2 2 255 " + bytes(3), "truncated"),
        (b"P5 2 2 255 " + bytes(5), "trailing"),
        (b"P5 2 2", "header"),
    ],
)
def test_malformed_inputs(tmp_path, payload, message):
    path = tmp_path / "bad.pnm"
    path.write_bytes(payload)
    with pytest.raises(PnmError, match=message):
        read_raw(path)


def test_write_rejects_other_types(tmp_path):
    with pytest.raises(TypeError):
        write_raw(object(), tmp_path / "x.ppm")
