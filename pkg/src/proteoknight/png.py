"""Minimal deterministic PNG I/O for 8-bit RGB rasters.

Writing is pinned to one canonical byte stream (filter 0 on every row, one
IDAT chunk, fixed zlib level) so that encoding the same image always yields
identical files, regardless of worker count or platform. The reader accepts
any non-interlaced 8-bit RGB baseline PNG, including all five row filters.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
# fixed so identical pixels always produce identical files; level 3 keeps
# sparse walk rasters small without throttling encode throughput
_ZLIB_LEVEL = 3


def _chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag)
    crc = zlib.crc32(payload, crc)
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode_rgb(pixels: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as PNG bytes."""
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ValueError(f"expected (H, W, 3) uint8 array, got {pixels.shape} {pixels.dtype}")
    h, w = pixels.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = bytearray()
    for row in pixels:
        raw.append(0)  # filter type 0 (None)
        raw.extend(row.tobytes())
    idat = zlib.compress(bytes(raw), _ZLIB_LEVEL)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def write_rgb(path, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_rgb(pixels))


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def decode_rgb(data: bytes) -> np.ndarray:
    """Decode PNG bytes into an (H, W, 3) uint8 array.

    Only non-interlaced 8-bit RGB (color type 2) is supported.
    """
    if data[:8] != _SIGNATURE:
        raise ValueError("not a PNG file")
    pos = 8
    width = height = None
    idat = bytearray()
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            width, height, depth, ctype, comp, filt, interlace = struct.unpack(
                ">IIBBBBB", payload
            )
            if (depth, ctype, comp, filt, interlace) != (8, 2, 0, 0, 0):
                raise ValueError(
                    "unsupported PNG variant (need 8-bit RGB, no interlace)"
                )
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if width is None:
        raise ValueError("PNG missing IHDR")
    raw = zlib.decompress(bytes(idat))
    stride = width * 3
    if len(raw) != height * (stride + 1):
        raise ValueError("PNG pixel data has wrong length")

    out = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        ftype = raw[y * (stride + 1)]
        row = np.frombuffer(
            raw, dtype=np.uint8, count=stride, offset=y * (stride + 1) + 1
        ).astype(np.int32)
        if ftype == 0:
            cur = row
        elif ftype == 1:  # Sub
            cur = row.copy()
            for i in range(3, stride):
                cur[i] = (cur[i] + cur[i - 3]) & 0xFF
        elif ftype == 2:  # Up
            cur = (row + prev) & 0xFF
        elif ftype == 3:  # Average
            cur = row.copy()
            for i in range(stride):
                left = cur[i - 3] if i >= 3 else 0
                cur[i] = (cur[i] + ((left + int(prev[i])) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            cur = row.copy()
            for i in range(stride):
                left = cur[i - 3] if i >= 3 else 0
                upleft = int(prev[i - 3]) if i >= 3 else 0
                cur[i] = (cur[i] + _paeth(left, int(prev[i]), upleft)) & 0xFF
        else:
            raise ValueError(f"unknown PNG filter type {ftype}")
        out[y] = cur.astype(np.uint8)
        prev = out[y]
    return out.reshape(height, width, 3)


def read_rgb(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_rgb(fh.read())
