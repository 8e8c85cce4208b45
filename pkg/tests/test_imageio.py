import numpy as np
import pytest

from wavelift import imageio
from wavelift.imageio import ImageFormatError, RawImage


def test_parse_size():
    assert imageio.parse_size("640x480") == (640, 480)
    assert imageio.parse_size(" 2X4 ") == (2, 4)
    for bad in ("640", "0x4", "axb", None):
        with pytest.raises(ValueError):
            imageio.parse_size(bad)


def test_guess_format():
    assert imageio.guess_format("a/b.PGM") == "pgm"
    assert imageio.guess_format("x.raw") == "f32le"


def test_f32le_round_trip_is_exact(tmp_path):
    px = np.random.default_rng(0).standard_normal((6, 10)).astype(np.float32)
    path = tmp_path / "x.f32"
    imageio.store(RawImage.from_array(px), path)
    assert path.stat().st_size == 4 * px.size
    back = imageio.load(path, "f32le", (10, 6))
    assert back.pixels.tobytes() == px.tobytes()


def test_f32le_is_little_endian(tmp_path):
    path = tmp_path / "one.f32"
    imageio.store(np.array([[1.0, 2.0]]), path)
    assert path.read_bytes() == np.array([1.0, 2.0], "<f4").tobytes()


def test_f32le_size_mismatch(tmp_path):
    path = tmp_path / "x.f32"
    imageio.store(np.zeros((4, 4)), path)
    with pytest.raises(ImageFormatError, match="size mismatch"):
        imageio.load(path, "f32le", (4, 2))
    with pytest.raises(ImageFormatError):
        imageio.load(path, "f32le")


def test_f32le_rejects_nan(tmp_path):
    path = tmp_path / "x.f32"
    px = np.zeros((2, 2), np.float32)
    px[1, 0] = np.nan
    imageio.store(px, path)
    with pytest.raises(ImageFormatError, match="NaN"):
        imageio.load(path, "f32le", (2, 2))


def test_pgm_round_trip(tmp_path):
    px = np.random.default_rng(1).integers(0, 256, (4, 6)).astype(np.float32) / 255
    path = tmp_path / "x.pgm"
    imageio.store(px, path, "pgm")
    assert path.read_bytes().startswith(b"P5\n6 4\n255\n")
    back = imageio.load(path, "pgm")
    assert (back.width, back.height) == (6, 4)
    np.testing.assert_allclose(back.pixels, px, atol=1e-6)


def test_pgm_clamps(tmp_path):
    path = tmp_path / "x.pgm"
    imageio.store(np.array([[-1.0, 2.0]]), path, "pgm")
    assert path.read_bytes()[-2:] == b"\x00\xff"


def test_pgm_header_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n# depth\n100\n\x00\x64")
    img = imageio.load(path, "pgm")
    np.testing.assert_allclose(img.pixels, [[0.0, 1.0]])


@pytest.mark.parametrize("blob, match", [
    (b"P2\n1 1\n255\n0", "P5"),
    (b"P5\n2 2\n255\n\x00", "bytes"),
    (b"P5\n2 2\n65535\n", "8-bit"),
    (b"P5\n2", "truncated"),
])
def test_pgm_errors(tmp_path, blob, match):
    path = tmp_path / "bad.pgm"
    path.write_bytes(blob)
    with pytest.raises(ImageFormatError, match=match):
        imageio.load(path, "pgm")


def test_mallat_layout():
    planes = [np.full((2, 3), v, np.float32) for v in range(4)]
    img = imageio.mallat_image(planes)
    assert (img.width, img.height) == (6, 4)
    assert img.pixels[0, 0] == 0 and img.pixels[0, 5] == 1 and img.pixels[3, 0] == 2 and img.pixels[3, 5] == 3
    for a, b in zip(imageio.split_mallat(img), planes):
        assert np.array_equal(a, b)


def test_store_planes(tmp_path):
    planes = [np.full((1, 1), v, np.float32) for v in range(4)]
    path = tmp_path / "m.f32"
    imageio.store(planes, path)
    assert list(np.fromfile(path, "<f4")) == [0, 1, 2, 3]


def test_raw_image_shape_checked():
    with pytest.raises(ImageFormatError):
        RawImage(3, 2, np.zeros((3, 2)))


def test_unknown_format(tmp_path):
    with pytest.raises(ImageFormatError):
        imageio.store(np.zeros((2, 2)), tmp_path / "x", "tiff")
