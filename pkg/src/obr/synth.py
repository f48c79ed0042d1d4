"""Synthetic Braille pages with known ground truth.

Dots are drawn as dark disks on a light page so the recognition chain has
to complement the image before thresholding, as it would for a scan.
Randomness comes from numpy's PCG64 generator seeded from the config.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .codec import EMPTY, from_unicode_braille
from .dots import DotCentroid
from .errors import EmptyPage, UnencodableGrapheme
from .grid import BrailleDimensions
from .raster import GrayImage

__all__ = ["SynthConfig", "encode_text", "render_page", "format_truth"]

# Refuse pages that would need more than this many pixels.
MAX_PIXELS = 50_000_000


@dataclass(frozen=True)
class SynthConfig:
    dpi: float = 300.0
    dims: BrailleDimensions = field(default_factory=BrailleDimensions)
    dot_radius: float = None  # px; None derives it from dims and dpi
    dot_intensity: int = 60
    background: int = 220
    noise_sigma: float = 0.0
    jitter: float = 0.0  # px, uniform in [-jitter, +jitter] per axis
    margin: float = 40.0  # px
    seed: int = 0

    def __post_init__(self):
        if not self.dpi > 0:
            raise ValueError("dpi must be positive")
        if not 0 <= self.dot_intensity < self.background <= 255:
            raise ValueError("need 0 <= dot_intensity < background <= 255")
        if self.noise_sigma < 0 or self.jitter < 0 or self.margin < 0:
            raise ValueError("noise_sigma, jitter and margin must be >= 0")
        if self.dot_radius is not None and not self.dot_radius > 0:
            raise ValueError("dot_radius must be positive")

    @property
    def radius_px(self):
        if self.dot_radius is not None:
            return self.dot_radius
        return self.dims.dot_radius_px(self.dpi)

    @property
    def geometry(self):
        o = self.margin + self.radius_px
        return self.dims.geometry(self.dpi, o, o)


def encode_text(text, table):
    """Convert text to lines of cells.

    Graphemes are matched longest first against the table (aliases
    included). A space is a blank cell, a newline starts a new line, and
    Unicode Braille pattern characters pass through as their own cells.
    """
    enc = table.encoder()
    longest = max(len(g) for g in enc)
    lines = [[]]
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            lines.append([])
            pos += 1
            continue
        if ch == " ":
            lines[-1].append(EMPTY)
            pos += 1
            continue
        for size in range(min(longest, len(text) - pos), 0, -1):
            cell = enc.get(text[pos:pos + size])
            if cell is not None:
                lines[-1].append(cell)
                pos += size
                break
        else:
            cell = from_unicode_braille(ch)
            if cell is None:
                raise UnencodableGrapheme(ch, pos + 1)
            lines[-1].append(cell)
            pos += 1
    return lines


def render_page(cells, config=SynthConfig()):
    """Draw ``cells`` and return the image with the true dot centres.

    The returned :class:`DotCentroid` list is in (line, col, dot) order and
    carries the rasterized disk areas.
    """
    if not any(c for line in cells for c in line):
        raise EmptyPage("nothing to render: every cell is blank")
    geom = config.geometry
    r = config.radius_px
    ncols = max(len(line) for line in cells)
    width = math.ceil(geom.origin_x + (ncols - 1) * geom.cell_advance_x
                      + geom.dot_pitch + r + config.margin) + 1
    height = math.ceil(geom.origin_y + (len(cells) - 1) * geom.line_advance_y
                       + 2 * geom.dot_pitch + r + config.margin) + 1
    if width * height > MAX_PIXELS:
        raise ValueError(f"page of {width}x{height} px exceeds {MAX_PIXELS} pixels")

    rng = np.random.Generator(np.random.PCG64(config.seed))
    page = np.full((height, width), float(config.background))
    truth = []
    for li, line in enumerate(cells):
        for ci, cell in enumerate(line):
            for dot in cell.dots:
                cx, cy = geom.dot_position(li, ci, dot)
                if config.jitter > 0:
                    cx += rng.uniform(-config.jitter, config.jitter)
                    cy += rng.uniform(-config.jitter, config.jitter)
                x0, x1 = max(0, math.floor(cx - r)), min(width - 1, math.ceil(cx + r))
                y0, y1 = max(0, math.floor(cy - r)), min(height - 1, math.ceil(cy + r))
                yy, xx = np.mgrid[y0:y1 + 1, x0:x1 + 1]
                disk = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
                page[y0:y1 + 1, x0:x1 + 1][disk] = config.dot_intensity
                truth.append(DotCentroid(cx, cy, max(1, int(disk.sum()))))
    if config.noise_sigma > 0:
        page += rng.normal(0.0, config.noise_sigma, page.shape)
    page = np.clip(np.floor(page + 0.5), 0, 255).astype(np.uint8)
    return GrayImage(page), truth


def format_truth(truth):
    """Sidecar text: one "x y area" line per dot."""
    return "".join(f"{d.x:.3f} {d.y:.3f} {d.area}\n" for d in truth)
