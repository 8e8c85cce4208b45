"""
Single-channel image files.

``f32le``
    Headerless little-endian float32, row-major.  Dimensions come from the
    caller.  Round trips are bit-exact.
``pgm``
    Binary 8-bit PGM (``P5``), normalised to ``[0, 1]`` on load, clamped and
    quantised on store.  Meant for looking at subbands, not for exchange.
"""

from dataclasses import dataclass
import os
import re

import numpy as np

__all__ = [
    "RawImage",
    "ImageFormatError",
    "load",
    "store",
    "mallat_image",
    "split_mallat",
    "guess_format",
    "parse_size",
]

FORMATS = ("f32le", "pgm")


class ImageFormatError(ValueError):
    pass


@dataclass
class RawImage:
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float32)
        if self.pixels.shape != (self.height, self.width):
            raise ImageFormatError(
                "pixel array {} does not match {}x{}".format(self.pixels.shape, self.width, self.height)
            )

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=np.float32)
        return cls(arr.shape[1], arr.shape[0], arr)


def parse_size(text):
    """``"640x480"`` -> ``(640, 480)``."""
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text or "")
    if not m:
        raise ValueError("size must look like WxH, got {!r}".format(text))
    w, h = int(m.group(1)), int(m.group(2))
    if w < 1 or h < 1:
        raise ValueError("size must be positive")
    return w, h


def guess_format(path):
    return "pgm" if str(path).lower().endswith(".pgm") else "f32le"


def load(path, format="f32le", size=None):
    if format == "f32le":
        if size is None:
            raise ImageFormatError("f32le input needs explicit dimensions")
        w, h = size
        raw = np.fromfile(path, dtype="<f4")
        if raw.size * 4 != _file_size(path) or raw.size != w * h:
            raise ImageFormatError(
                "size mismatch: {} bytes in {}, expected {} for {}x{}".format(
                    _file_size(path), path, 4 * w * h, w, h
                )
            )
        if np.isnan(raw).any():
            raise ImageFormatError("NaN values in {}".format(path))
        return RawImage(w, h, raw.astype(np.float32).reshape(h, w))
    if format == "pgm":
        with open(path, "rb") as f:
            blob = f.read()
        return _parse_pgm(blob, path)
    raise ImageFormatError("unknown format {!r}".format(format))


def _file_size(path):
    return os.path.getsize(path)


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def _parse_pgm(blob, path):
    pos = 0
    fields = []
    while len(fields) < 4:
        m = _PGM_TOKEN.match(blob, pos)
        if not m:
            raise ImageFormatError("truncated PGM header in {}".format(path))
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise ImageFormatError("not a binary PGM (P5) file: {}".format(path))
    try:
        w, h, maxval = (int(x) for x in fields[1:])
    except ValueError:
        raise ImageFormatError("malformed PGM header in {}".format(path)) from None
    if not 0 < maxval < 256 or w < 1 or h < 1:
        raise ImageFormatError("only 8-bit PGM is supported (maxval {})".format(maxval))
    pos += 1  # single whitespace after maxval
    body = blob[pos:pos + w * h]
    if len(body) != w * h:
        raise ImageFormatError("PGM pixel data is {} bytes, expected {}".format(len(body), w * h))
    px = np.frombuffer(body, dtype=np.uint8).reshape(h, w).astype(np.float32) / np.float32(maxval)
    return RawImage(w, h, px)


def mallat_image(planes):
    """Tile ``(LL, HL, LH, HH)`` planes into one image, LL top-left, HL top-right."""
    ll, hl, lh, hh = (np.asarray(p, dtype=np.float32) for p in planes)
    return RawImage.from_array(np.block([[ll, hl], [lh, hh]]))


def split_mallat(img):
    px = img.pixels if isinstance(img, RawImage) else np.asarray(img, dtype=np.float32)
    h, w = px.shape
    if h % 2 or w % 2:
        raise ImageFormatError("Mallat images have even dimensions")
    h2, w2 = h // 2, w // 2
    return px[:h2, :w2], px[:h2, w2:], px[h2:, :w2], px[h2:, w2:]


def store(img, path, format="f32le"):
    """Write a :class:`RawImage`, or four Mallat planes as one image."""
    if isinstance(img, (tuple, list)):
        img = mallat_image(img)
    elif not isinstance(img, RawImage):
        img = RawImage.from_array(img)
    if format == "f32le":
        img.pixels.astype("<f4").tofile(path)
    elif format == "pgm":
        q = np.rint(np.clip(img.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
        with open(path, "wb") as f:
            f.write(b"P5\n%d %d\n255\n" % (img.width, img.height))
            f.write(q.tobytes())
    else:
        raise ImageFormatError("unknown format {!r}".format(format))
