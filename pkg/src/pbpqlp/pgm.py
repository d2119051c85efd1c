"""Binary PGM (P5, 8-bit) image reading and writing.

Pixels map to matrix entries in ``[0, 1]`` (gray value divided by 255); rows
of the matrix are rows of the image.  Writing clamps to ``[0, 1]`` and
quantizes to 8 bits, so a load/write round trip moves every entry by at most
``1/255``.  Malformed files raise
:class:`~pbpqlp.exceptions.PgmFormatError` carrying the byte offset of the
problem.
"""

import numpy as np

from .exceptions import PgmFormatError
from .validation import check_matrix

__all__ = ["load_pgm", "write_pgm"]

_MAXVAL = 255
_WHITESPACE = b" \t\r\n\v\f"


class _HeaderScanner:
    """Token scanner for the PGM header that tracks byte offsets."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            byte = self.data[self.pos : self.pos + 1]
            if byte in _WHITESPACE:
                self.pos += 1
            elif byte == b"#":  # comment runs to end of line
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                return

    def next_token(self, what):
        self._skip_separators()
        start = self.pos
        if start >= len(self.data):
            raise PgmFormatError(f"unexpected end of header while reading {what}", start)
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE:
            if self.data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        return self.data[start : self.pos], start

    def next_int(self, what, low, high):
        token, start = self.next_token(what)
        try:
            value = int(token)
        except ValueError:
            raise PgmFormatError(f"{what} is not an integer: {token!r}", start) from None
        if not low <= value <= high:
            raise PgmFormatError(f"{what} must be in [{low}, {high}], got {value}", start)
        return value


def load_pgm(path):
    """Read a binary PGM file into a matrix with entries in ``[0, 1]``.

    Only the binary 8-bit flavor is accepted: magic ``P5``, arbitrary header
    whitespace and ``#`` comments, maxval exactly 255, and a raster of
    ``width * height`` bytes.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    scanner = _HeaderScanner(data)
    magic, offset = scanner.next_token("magic number")
    if magic != b"P5":
        raise PgmFormatError(f"not a binary PGM: magic {magic!r} instead of b'P5'", offset)
    width = scanner.next_int("width", 1, 1 << 30)
    height = scanner.next_int("height", 1, 1 << 30)
    maxval_token, maxval_offset = scanner.next_token("maxval")
    try:
        maxval = int(maxval_token)
    except ValueError:
        raise PgmFormatError(f"maxval is not an integer: {maxval_token!r}", maxval_offset) from None
    if maxval != _MAXVAL:
        raise PgmFormatError(f"unsupported maxval {maxval}; only {_MAXVAL} is accepted", maxval_offset)
    if scanner.pos >= len(data):
        raise PgmFormatError("missing raster separator after maxval", scanner.pos)
    if data[scanner.pos : scanner.pos + 1] not in _WHITESPACE:
        raise PgmFormatError("maxval must be followed by a whitespace byte", scanner.pos)
    raster_start = scanner.pos + 1

    expected = width * height
    actual = len(data) - raster_start
    if actual < expected:
        raise PgmFormatError(
            f"truncated raster: expected {expected} pixel bytes, found {actual}",
            raster_start + actual,
        )
    raster = np.frombuffer(data, dtype=np.uint8, count=expected, offset=raster_start)
    return raster.reshape(height, width).astype(np.float64) / _MAXVAL


def write_pgm(m, path):
    """Write a matrix as a binary 8-bit PGM file.

    Entries are clamped to ``[0, 1]`` and quantized to the nearest of 256
    gray levels.  The matrix's row count becomes the image height.
    """
    m = check_matrix(m, "image")
    height, width = m.shape
    quantized = np.rint(np.clip(m, 0.0, 1.0) * _MAXVAL).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{_MAXVAL}\n".encode("ascii"))
        fh.write(quantized.tobytes())
