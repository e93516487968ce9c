"""PBM (portable bitmap) reading and writing.

Supports P1 (ASCII) and P4 (packed binary); bit value 1 is foreground.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from cocyc.grid import BinaryImage

DEFAULT_MAX_SIZE = 4096


class PbmError(Exception):
    """Malformed, truncated or oversized PBM input."""


def _tokens(data: bytes):
    """Header tokens: whitespace separated, '#' starts a comment to EOL."""
    i, n = 0, len(data)
    while i < n:
        c = data[i : i + 1]
        if c in b" \t\r\n":
            i += 1
        elif c == b"#":
            while i < n and data[i : i + 1] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < n and data[j : j + 1] not in b" \t\r\n#":
                j += 1
            yield data[i:j], j
            i = j


def loads(data: bytes, max_size: int = DEFAULT_MAX_SIZE) -> BinaryImage:
    toks = _tokens(data)
    try:
        magic, _ = next(toks)
    except StopIteration:
        raise PbmError("empty file") from None
    if magic not in (b"P1", b"P4"):
        raise PbmError(f"not a PBM file (magic {magic!r})")
    try:
        w_tok, _ = next(toks)
        h_tok, h_end = next(toks)
        width, height = int(w_tok), int(h_tok)
    except (StopIteration, ValueError):
        raise PbmError("missing or malformed dimensions") from None
    if width < 1 or height < 1:
        raise PbmError(f"bad dimensions {width}x{height}")
    if width > max_size or height > max_size:
        raise PbmError(f"image {width}x{height} exceeds limit {max_size}x{max_size}")

    arr = np.zeros((height, width), dtype=np.uint8)
    if magic == b"P1":
        bits = []
        for tok, _ in toks:
            for ch in tok.decode("ascii", errors="replace"):
                if ch == "0":
                    bits.append(0)
                elif ch == "1":
                    bits.append(1)
                else:
                    raise PbmError(f"unexpected character {ch!r} in P1 data")
        if len(bits) < width * height:
            raise PbmError("truncated P1 data")
        arr[:] = np.array(bits[: width * height], dtype=np.uint8).reshape(height, width)
    else:
        # single whitespace byte after the header, then packed rows
        pos = h_end
        if pos >= len(data) or data[pos : pos + 1] not in b" \t\r\n":
            raise PbmError("missing separator before P4 data")
        pos += 1
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raw = data[pos : pos + need]
        if len(raw) < need:
            raise PbmError("truncated P4 data")
        rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(rows, axis=1)[:, :width]
        arr[:] = bits
    return BinaryImage(arr)


def load(path: Union[str, os.PathLike], max_size: int = DEFAULT_MAX_SIZE) -> BinaryImage:
    with open(path, "rb") as fh:
        return loads(fh.read(), max_size=max_size)


def dumps_p1(img: BinaryImage) -> bytes:
    lines = [b"P1", f"{img.width} {img.height}".encode()]
    for y in range(img.height):
        lines.append(" ".join(str(int(v)) for v in img.pixels[y]).encode())
    return b"\n".join(lines) + b"\n"


def dumps_p4(img: BinaryImage) -> bytes:
    header = f"P4\n{img.width} {img.height}\n".encode()
    packed = np.packbits(img.pixels, axis=1)
    return header + packed.tobytes()


def save(img: BinaryImage, path: Union[str, os.PathLike], binary: bool = False) -> None:
    data = dumps_p4(img) if binary else dumps_p1(img)
    with open(path, "wb") as fh:
        fh.write(data)
