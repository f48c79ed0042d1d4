"""Enhancement and segmentation chain.

The stages run in a fixed order: 3x3 mean filter, percentile contrast
stretch, complement, 3x3 grayscale dilation, then a global threshold picked
by Otsu's between-class variance criterion.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from ._accel import njit, pick
from .errors import DegenerateHistogram
from .raster import BinaryImage, GrayImage, round_half_up

__all__ = [
    "Histogram", "DegenerateContrastWarning",
    "mean_filter3", "contrast_stretch", "complement", "dilate3",
    "histogram", "otsu_level", "separability", "binarize",
]


class DegenerateContrastWarning(UserWarning):
    """Contrast stretch found lo == hi and left the image unchanged."""


# --- 3x3 kernels -----------------------------------------------------------

def _mean3_loops(img):
    h, w = img.shape
    out = np.empty((h, w), np.uint8)
    for i in range(h):
        for j in range(w):
            s = 0
            for di in range(-1, 2):
                ii = min(max(i + di, 0), h - 1)
                for dj in range(-1, 2):
                    jj = min(max(j + dj, 0), w - 1)
                    s += img[ii, jj]
            out[i, j] = (2 * s + 9) // 18
    return out


def _dilate3_loops(img):
    # separable: max over rows, then over columns
    h, w = img.shape
    tmp = np.empty((h, w), np.uint8)
    for i in range(h):
        for j in range(w):
            m = img[i, j]
            if j > 0 and img[i, j - 1] > m:
                m = img[i, j - 1]
            if j < w - 1 and img[i, j + 1] > m:
                m = img[i, j + 1]
            tmp[i, j] = m
    out = np.empty((h, w), np.uint8)
    for i in range(h):
        up = max(i - 1, 0)
        down = min(i + 1, h - 1)
        for j in range(w):
            m = tmp[i, j]
            if tmp[up, j] > m:
                m = tmp[up, j]
            if tmp[down, j] > m:
                m = tmp[down, j]
            out[i, j] = m
    return out


def _shifted_views(img):
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    for di in range(3):
        for dj in range(3):
            yield padded[di:di + h, dj:dj + w]


def _mean3_numpy(img):
    acc = np.zeros(img.shape, np.int32)
    for view in _shifted_views(img):
        acc += view
    return round_half_up(acc, 9).astype(np.uint8)


def _dilate3_numpy(img):
    out = img.copy()
    for view in _shifted_views(img):
        np.maximum(out, view, out=out)
    return out


mean3_numba = njit(_mean3_loops)
dilate3_numba = njit(_dilate3_loops)
mean3_numpy = _mean3_numpy
dilate3_numpy = _dilate3_numpy

_mean3 = pick(mean3_numba, mean3_numpy)
_dilate3 = pick(dilate3_numba, dilate3_numpy)


def mean_filter3(image):
    """3x3 box average with clamp-to-edge borders, rounded half up."""
    return GrayImage(_mean3(np.ascontiguousarray(image.data)))


def dilate3(image):
    """3x3 grayscale dilation (max filter) with clamp-to-edge borders."""
    return GrayImage(_dilate3(np.ascontiguousarray(image.data)))


# --- point operations ------------------------------------------------------

def contrast_stretch(image, p_low=1.0, p_high=99.0):
    """Linearly map the [p_low, p_high] percentile range onto [0, 255].

    ``lo`` is taken with the "lower" percentile rule and ``hi`` with the
    "higher" rule, so both are pixel values present in the image. When
    ``lo == hi`` the image is returned unchanged and a
    :class:`DegenerateContrastWarning` is issued.
    """
    if not (0 <= p_low < 50 < p_high <= 100):
        raise ValueError(f"need 0 <= p_low < 50 < p_high <= 100, got {p_low}, {p_high}")
    data = image.data
    lo = int(np.percentile(data, p_low, method="lower"))
    hi = int(np.percentile(data, p_high, method="higher"))
    if lo == hi:
        warnings.warn(f"degenerate contrast: lo == hi == {lo}",
                      DegenerateContrastWarning, stacklevel=2)
        return image
    v = np.clip(data.astype(np.int64), lo, hi) - lo
    return GrayImage(round_half_up(255 * v, hi - lo).astype(np.uint8))


def complement(image):
    return GrayImage(255 - image.data)


# --- thresholding ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Histogram:
    """Intensity counts, indexed 0..255."""
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.shape != (256,):
            raise ValueError(f"histogram needs 256 bins, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self):
        return int(self.counts.sum())


def histogram(image):
    return Histogram(np.bincount(image.data.ravel(), minlength=256))


def otsu_level(hist):
    """Smallest threshold t in [0, 254] maximizing between-class variance.

    Class 0 holds intensities <= t. Scores are compared exactly in integer
    arithmetic: with class counts n0, n1 and intensity sums s0, s1 the
    variance is proportional to (s0*n1 - s1*n0)**2 / (n0*n1).
    """
    counts = [int(c) for c in hist.counts]
    if sum(1 for c in counts if c) < 2:
        raise DegenerateHistogram("histogram has fewer than two populated bins")
    total_n = sum(counts)
    total_s = sum(i * c for i, c in enumerate(counts))
    best_t, best_num, best_den = 0, 0, 1
    n0 = s0 = 0
    for t in range(255):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            continue
        num = (s0 * n1 - (total_s - s0) * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def separability(hist, level):
    """Between-class over total variance for a split at ``level``, in [0, 1].

    Near 1 for a clean two-level image; pure noise stays well below 0.8.
    """
    counts = hist.counts.astype(np.float64)
    levels = np.arange(256)
    n = counts.sum()
    mu = (levels * counts).sum() / n
    total = (counts * (levels - mu) ** 2).sum() / n
    if total == 0:
        return 0.0
    w0 = counts[:level + 1].sum() / n
    if w0 in (0.0, 1.0):
        return 0.0
    mu0 = (levels[:level + 1] * counts[:level + 1]).sum() / (w0 * n)
    mu1 = (levels[level + 1:] * counts[level + 1:]).sum() / ((1 - w0) * n)
    return float(w0 * (1 - w0) * (mu0 - mu1) ** 2 / total)


def binarize(image, level):
    """Foreground is every pixel strictly brighter than ``level``."""
    if not 0 <= level <= 254:
        raise ValueError(f"threshold level must be in [0, 254], got {level}")
    return BinaryImage((image.data > level).astype(np.uint8))
