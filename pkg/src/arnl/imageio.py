"""Minimal grayscale image file I/O.

Binary PGM (P5) is the canonical format: trivially bit-exact for fixtures
and diffable with a hex dump. 8-bit PNG is accepted on input (grayscale,
gray+alpha, RGB, RGBA, or palette; no interlacing, no 16 bit) and written
for grayscale output. Color pixels are reduced to BT.601 luminance. The
decoder favors clarity over speed.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .image_core import as_image

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_LUMA = (0.299, 0.587, 0.114)


def to_luminance(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luminance of an (H, W, 3) array."""
    return _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]


def quantize(img: np.ndarray) -> np.ndarray:
    """Round and clip to 8-bit; the only place fractional values are lost."""
    return np.clip(np.rint(as_image(img)), 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# PGM (P5)
# ---------------------------------------------------------------------------

def _pgm_tokens(data: bytes, count: int):
    """First ``count`` whitespace-separated header tokens, skipping comments.

    Returns (tokens, offset of the byte after the single whitespace that
    terminates the last token).
    """
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValueError("truncated PGM header")
        ch = data[i : i + 1]
        if ch == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            tokens.append(data[i:j])
            i = j
            if len(tokens) == count:
                if i >= len(data) or not data[i : i + 1].isspace():
                    raise ValueError("malformed PGM header")
                i += 1  # single whitespace before raster
    return tokens, i


def read_pgm(data: bytes) -> np.ndarray:
    tokens, offset = _pgm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    if width < 1 or height < 1:
        raise ValueError(f"invalid PGM dimensions {width}x{height}")
    if not (0 < maxval < 256):
        raise ValueError(f"unsupported PGM maxval {maxval}")
    raster = data[offset : offset + width * height]
    if len(raster) != width * height:
        raise ValueError("truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.float64)


def write_pgm(img: np.ndarray) -> bytes:
    q = quantize(img)
    header = f"P5\n{q.shape[1]} {q.shape[0]}\n255\n".encode()
    return header + q.tobytes()


# ---------------------------------------------------------------------------
# PNG (8-bit, non-interlaced)
# ---------------------------------------------------------------------------

def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _unfilter(raw: bytes, height: int, width: int, channels: int) -> np.ndarray:
    stride = width * channels
    out = np.zeros((height, stride), dtype=np.uint8)
    pos = 0
    for row in range(height):
        ftype = raw[pos]
        line = np.frombuffer(raw[pos + 1 : pos + 1 + stride], dtype=np.uint8).astype(np.int32)
        pos += 1 + stride
        prev = out[row - 1].astype(np.int32) if row else np.zeros(stride, dtype=np.int32)
        if ftype == 0:
            rec = line
        elif ftype == 2:
            rec = (line + prev) % 256
        elif ftype == 1 or ftype == 3 or ftype == 4:
            rec = np.zeros(stride, dtype=np.int32)
            for i in range(stride):
                left = rec[i - channels] if i >= channels else 0
                if ftype == 1:
                    rec[i] = (line[i] + left) % 256
                elif ftype == 3:
                    rec[i] = (line[i] + (left + prev[i]) // 2) % 256
                else:
                    ul = rec[i - channels] if i >= channels else 0
                    diag = prev[i - channels] if i >= channels else 0
                    rec[i] = (line[i] + _paeth(int(ul), int(prev[i]), int(diag))) % 256
        else:
            raise ValueError(f"unknown PNG filter type {ftype}")
        out[row] = rec.astype(np.uint8)
    return out


def read_png(data: bytes) -> np.ndarray:
    if data[:8] != _PNG_SIGNATURE:
        raise ValueError("not a PNG file")
    pos = 8
    header = None
    palette = None
    idat = bytearray()
    while pos < len(data):
        length, ctype = struct.unpack(">L4s", data[pos : pos + 8])
        chunk = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if ctype == b"IHDR":
            header = struct.unpack(">LLBBBBB", chunk)
        elif ctype == b"PLTE":
            palette = np.frombuffer(chunk, dtype=np.uint8).reshape(-1, 3)
        elif ctype == b"IDAT":
            idat.extend(chunk)
        elif ctype == b"IEND":
            break
    if header is None:
        raise ValueError("PNG missing IHDR")
    width, height, depth, color, _, _, interlace = header
    if depth != 8:
        raise ValueError(f"unsupported PNG bit depth {depth} (only 8)")
    if interlace:
        raise ValueError("interlaced PNG not supported")
    channels = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}.get(color)
    if channels is None:
        raise ValueError(f"unsupported PNG color type {color}")
    raw = zlib.decompress(bytes(idat))
    expected = height * (1 + width * channels)
    if len(raw) != expected:
        raise ValueError("PNG pixel data has unexpected length")
    pix = _unfilter(raw, height, width, channels).reshape(height, width, channels)
    if color == 0:
        img = pix[:, :, 0].astype(np.float64)
    elif color == 4:
        img = pix[:, :, 0].astype(np.float64)  # alpha ignored
    elif color == 3:
        if palette is None:
            raise ValueError("palette PNG missing PLTE")
        img = to_luminance(palette[pix[:, :, 0]].astype(np.float64))
    else:
        img = to_luminance(pix[:, :, :3].astype(np.float64))
    return img


def write_png(img: np.ndarray) -> bytes:
    q = quantize(img)
    height, width = q.shape

    def chunk(ctype: bytes, payload: bytes) -> bytes:
        crc = zlib.crc32(payload, zlib.crc32(ctype))
        return struct.pack(">L", len(payload)) + ctype + payload + struct.pack(">L", crc)

    ihdr = struct.pack(">LLBBBBB", width, height, 8, 0, 0, 0, 0)
    raster = b"".join(b"\x00" + q[row].tobytes() for row in range(height))
    return (_PNG_SIGNATURE + chunk(b"IHDR", ihdr)
            + chunk(b"IDAT", zlib.compress(raster, 9)) + chunk(b"IEND", b""))


# ---------------------------------------------------------------------------
# Path-level helpers
# ---------------------------------------------------------------------------

def read_image(path) -> np.ndarray:
    """Load a grayscale image (PGM P5 or 8-bit PNG) as float64."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] == _PNG_SIGNATURE:
        return read_png(data)
    if data[:2] == b"P5":
        return read_pgm(data)
    raise ValueError(f"{path}: not a PGM (P5) or PNG file")


def write_image(path, img: np.ndarray) -> None:
    """Save as PGM or PNG depending on the file extension."""
    name = str(path).lower()
    if name.endswith(".png"):
        payload = write_png(img)
    elif name.endswith(".pgm"):
        payload = write_pgm(img)
    else:
        raise ValueError(f"{path}: unsupported output extension (use .pgm or .png)")
    with open(path, "wb") as fh:
        fh.write(payload)
