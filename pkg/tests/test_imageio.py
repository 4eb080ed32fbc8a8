import struct
import zlib

import numpy as np
import pytest

from arnl.imageio import (quantize, read_image, read_pgm, read_png,
                          to_luminance, write_image, write_pgm, write_png)


def png_chunk(ctype: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(payload, zlib.crc32(ctype))
    return struct.pack(">L", len(payload)) + ctype + payload + struct.pack(">L", crc)


def build_png(width, height, color, scanlines, bitdepth=8, interlace=0, plte=None):
    """Hand-rolled PNG for decoder tests; scanlines include filter bytes."""
    out = b"\x89PNG\r\n\x1a\n"
    out += png_chunk(b"IHDR", struct.pack(">LLBBBBB", width, height, bitdepth,
                                          color, 0, 0, interlace))
    if plte is not None:
        out += png_chunk(b"PLTE", plte)
    out += png_chunk(b"IDAT", zlib.compress(b"".join(scanlines)))
    out += png_chunk(b"IEND", b"")
    return out


def reference_unfilter(scanlines, width, channels):
    """Bytewise PNG unfiltering straight from the filter definitions in the
    PNG standard."""
    stride = width * channels
    prev = [0] * stride
    rows = []
    for line in scanlines:
        ftype, raw = line[0], list(line[1:])
        rec = [0] * stride
        for i in range(stride):
            left = rec[i - channels] if i >= channels else 0
            up = prev[i]
            ul = prev[i - channels] if i >= channels else 0
            if ftype == 0:
                rec[i] = raw[i]
            elif ftype == 1:
                rec[i] = (raw[i] + left) % 256
            elif ftype == 2:
                rec[i] = (raw[i] + up) % 256
            elif ftype == 3:
                rec[i] = (raw[i] + (left + up) // 2) % 256
            else:
                p = left + up - ul
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - ul)
                pred = left if (pa <= pb and pa <= pc) else (up if pb <= pc else ul)
                rec[i] = (raw[i] + pred) % 256
        rows.append(rec)
        prev = rec
    return np.array(rows, dtype=np.float64)


def test_pgm_roundtrip(rng):
    img = rng.integers(0, 256, (7, 5)).astype(np.float64)
    data = write_pgm(img)
    assert data.startswith(b"P5\n5 7\n255\n")
    np.testing.assert_array_equal(read_pgm(data), img)


def test_pgm_comments_and_whitespace():
    raster = bytes(range(6))
    data = b"P5 # magic\n# a comment line\n 3\t2 # dims\n255\n" + raster
    img = read_pgm(data)
    np.testing.assert_array_equal(img, np.arange(6.0).reshape(2, 3))


def test_pgm_rejects_garbage():
    with pytest.raises(ValueError):
        read_pgm(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ValueError):
        read_pgm(b"P5\n2 2\n70000\n" + bytes(8))
    with pytest.raises(ValueError):
        read_pgm(b"P5\n4 4\n255\n" + bytes(3))


def test_quantize_rounds_and_clips():
    img = np.array([[-4.0, 0.4, 254.6, 300.0]])
    np.testing.assert_array_equal(quantize(img), np.array([[0, 0, 255, 255]], dtype=np.uint8))


def test_png_roundtrip_gray(rng):
    img = rng.integers(0, 256, (9, 6)).astype(np.float64)
    np.testing.assert_array_equal(read_png(write_png(img)), img)


def test_png_rgb_luminance():
    pix = bytes([255, 0, 0, 0, 255, 0])  # one red and one green pixel
    data = build_png(2, 1, 2, [b"\x00" + pix])
    img = read_png(data)
    np.testing.assert_allclose(img, [[0.299 * 255, 0.587 * 255]], atol=1e-12)


def test_png_all_filter_types(rng):
    width, height = 5, 5
    lines = [bytes([f]) + bytes(rng.integers(0, 256, width).tolist())
             for f in (0, 1, 2, 3, 4)]
    data = build_png(width, height, 0, lines)
    expected = reference_unfilter(lines, width, 1)
    np.testing.assert_array_equal(read_png(data), expected)


def test_png_palette():
    plte = bytes([10, 10, 10, 200, 100, 0])
    lines = [b"\x00\x00\x01"]
    data = build_png(2, 1, 3, lines, plte=plte)
    img = read_png(data)
    lum = to_luminance(np.array([[[10, 10, 10], [200, 100, 0]]], dtype=np.float64))
    np.testing.assert_allclose(img, lum, atol=1e-12)


def test_png_rejects_unsupported():
    with pytest.raises(ValueError):
        read_png(build_png(2, 1, 0, [b"\x00" + bytes(4)], bitdepth=16))
    with pytest.raises(ValueError):
        read_png(build_png(2, 1, 0, [b"\x00" + bytes(2)], interlace=1))
    with pytest.raises(ValueError):
        read_png(b"not a png at all")


def test_luminance_weights():
    rgb = np.zeros((1, 1, 3))
    rgb[0, 0] = [100.0, 200.0, 50.0]
    assert to_luminance(rgb)[0, 0] == pytest.approx(0.299 * 100 + 0.587 * 200 + 0.114 * 50)


def test_path_roundtrip(tmp_path, rng):
    img = rng.integers(0, 256, (8, 8)).astype(np.float64)
    for name in ("img.pgm", "img.png"):
        path = tmp_path / name
        write_image(path, img)
        np.testing.assert_array_equal(read_image(path), img)


def test_read_image_bad_magic(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"JUNK")
    with pytest.raises(ValueError):
        read_image(path)


def test_write_image_unknown_extension(tmp_path):
    with pytest.raises(ValueError):
        write_image(tmp_path / "img.tiff", np.ones((2, 2)))
