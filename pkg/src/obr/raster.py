"""Pixel buffers, binary PGM/PPM I/O and RGB to gray conversion."""
from dataclasses import dataclass

import numpy as np

from .errors import MalformedHeader, TruncatedBody

__all__ = [
    "GrayImage", "RasterRGB", "BinaryImage",
    "load_pnm", "save_pnm", "read_pnm", "write_pnm",
    "rgb_to_gray", "round_half_up",
]


def _freeze(arr, dtype, ndim):
    arr = np.array(arr, dtype=dtype, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got {arr.shape[:2]}")
    arr.setflags(write=False)
    return arr


def _as_uint8(data):
    a = np.asarray(data)
    if a.dtype != np.uint8:
        if a.size and (a.min() < 0 or a.max() > 255):
            raise ValueError("pixel values must lie in [0, 255]")
    return a


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image; ``data`` has shape (height, width)."""
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(_as_uint8(self.data), np.uint8, 2))

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    def __eq__(self, other):
        return type(other) is GrayImage and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class RasterRGB:
    """8-bit RGB image; ``data`` has shape (height, width, 3)."""
    data: np.ndarray

    def __post_init__(self):
        arr = _freeze(_as_uint8(self.data), np.uint8, 3)
        if arr.shape[2] != 3:
            raise ValueError(f"RGB data needs 3 channels, got {arr.shape[2]}")
        object.__setattr__(self, "data", arr)

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    def __eq__(self, other):
        return type(other) is RasterRGB and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Foreground mask, 1 = dot. ``data`` is uint8 with values in {0, 1}."""
    data: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.data, np.uint8, 2)
        if arr.size and arr.max() > 1:
            raise ValueError("binary image values must be 0 or 1")
        object.__setattr__(self, "data", arr)

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    def to_gray(self):
        """Render as a 0/255 gray image, for stage dumps."""
        return GrayImage(self.data * np.uint8(255))

    def __eq__(self, other):
        return type(other) is BinaryImage and np.array_equal(self.data, other.data)


def round_half_up(num, den):
    """Integer ``round(num / den)`` with halves rounded up, for num >= 0, den > 0."""
    return (2 * num + den) // (2 * den)


_WHITESPACE = b" \t\r\n\v\f"


def _header_tokens(buf, count):
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset of the first body byte, which follows
    exactly one whitespace character after the last token.
    """
    tokens = []
    pos = 0
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos] in _WHITESPACE:
            pos += 1
        if pos < n and buf[pos] == ord("#"):
            while pos < n and buf[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and buf[pos] not in _WHITESPACE and buf[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise MalformedHeader("unexpected end of header")
        tokens.append(bytes(buf[start:pos]))
    if pos >= n or buf[pos] not in _WHITESPACE:
        raise MalformedHeader("header must end with a single whitespace byte")
    return tokens, pos + 1


def _positive_int(tok, what):
    if not tok.isdigit():
        raise MalformedHeader(f"bad {what}: {tok!r}")
    value = int(tok)
    if value < 1:
        raise MalformedHeader(f"{what} must be >= 1, got {value}")
    return value


def load_pnm(buf):
    """Parse a binary PGM (P5) or PPM (P6) file with maxval 255.

    Returns a :class:`GrayImage` for P5 and a :class:`RasterRGB` for P6.
    Trailing bytes after the pixel body are ignored.
    """
    buf = bytes(buf)
    magic = buf[:2]
    if magic not in (b"P5", b"P6"):
        raise MalformedHeader(f"unsupported magic {magic!r}; expected P5 or P6")
    if len(buf) < 3 or buf[2] not in _WHITESPACE + b"#":
        raise MalformedHeader("magic must be followed by whitespace")
    (width, height, maxval), body = _header_tokens(memoryview(buf)[2:], 3)
    body += 2
    width = _positive_int(width, "width")
    height = _positive_int(height, "height")
    if maxval != b"255":
        raise MalformedHeader(f"only maxval 255 is supported, got {maxval!r}")
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    if len(buf) - body < need:
        raise TruncatedBody(f"body has {len(buf) - body} bytes, need {need}")
    pixels = np.frombuffer(buf, dtype=np.uint8, count=need, offset=body)
    if channels == 1:
        return GrayImage(pixels.reshape(height, width))
    return RasterRGB(pixels.reshape(height, width, 3))


def save_pnm(image):
    """Serialize a gray or RGB image as binary P5/P6 with a minimal header."""
    if isinstance(image, GrayImage):
        magic = b"P5"
    elif isinstance(image, RasterRGB):
        magic = b"P6"
    else:
        raise TypeError(f"cannot save {type(image).__name__} as PNM")
    header = b"%s\n%d %d\n255\n" % (magic, image.width, image.height)
    return header + image.data.tobytes()


def read_pnm(path):
    with open(path, "rb") as fh:
        return load_pnm(fh.read())


def write_pnm(path, image):
    with open(path, "wb") as fh:
        fh.write(save_pnm(image))


# Weights scaled by 10_000 so the conversion is exact integer arithmetic.
_GRAY_WEIGHTS = np.array([2989, 5870, 1140], dtype=np.int64)


def rgb_to_gray(image):
    """Luma conversion ``0.2989 R + 0.5870 G + 0.1140 B``, rounded half up."""
    acc = image.data.astype(np.int64) @ _GRAY_WEIGHTS
    gray = round_half_up(acc, 10_000)
    return GrayImage(np.clip(gray, 0, 255).astype(np.uint8))
