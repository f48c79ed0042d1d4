"""End-to-end recognition of one page image."""
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import codec, dots, enhance, grid
from .errors import DegenerateHistogram, RecognitionError
from .raster import BinaryImage, GrayImage, RasterRGB, rgb_to_gray

__all__ = ["PipelineConfig", "PipelineResult", "StageFailure", "run_pipeline", "STAGE_NAMES"]

STAGE_NAMES = ("01-gray", "02-mean", "03-stretch", "04-complement", "05-dilate", "06-binary")


class StageFailure(RecognitionError):
    """A recognition error tagged with the stage that raised it."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")


@dataclass
class PipelineConfig:
    table: codec.CodeTable = field(default_factory=codec.english_grade1_table)
    dpi: float = None  # required for calibrated mode; defaults to 300 there
    lattice_mode: str = "calibrated"
    threshold: int = None  # fixed binarization level; None runs Otsu
    p_low: float = 1.0
    p_high: float = 99.0
    snap_tolerance: float = 0.35
    area_min: int = None
    area_max: int = None
    dims: grid.BrailleDimensions = field(default_factory=grid.BrailleDimensions)
    gap_ratio: float = 1.5
    # Otsu splits below this separability are treated as a blank page
    min_separability: float = 0.8

    def __post_init__(self):
        if self.lattice_mode not in ("calibrated", "auto"):
            raise ValueError(f"lattice_mode must be 'calibrated' or 'auto', got {self.lattice_mode!r}")
        if self.lattice_mode == "calibrated" and self.dpi is None:
            self.dpi = 300.0


@dataclass
class PipelineResult:
    document: codec.DecodedDocument
    geometry: grid.LatticeGeometry
    centroids: list
    lines: list  # cell lines as handed to the codec
    diagnostics: list  # human-readable strings from every stage
    stages: dict  # stage name -> GrayImage, in pipeline order

    @property
    def text(self):
        return self.document.text


def _dot_filter(config, components):
    if config.area_min is not None or config.area_max is not None:
        return dots.DotFilter(config.area_min or 1, config.area_max or 10**9)
    if config.dpi is not None:
        return dots.default_dot_filter(config.dims.dot_radius_px(config.dpi))
    # auto mode without a scale: size the window on the typical blob
    areas = [c.area for c in components if c.area >= 3]
    if not areas:
        return dots.DotFilter(3, 3)
    m = float(np.median(areas))
    return dots.DotFilter(max(3, round(0.2 * m)), max(3, round(5 * m)))


def run_pipeline(image, config=None):
    """Decode a gray or RGB page image.

    Raises :class:`StageFailure` when a stage cannot proceed; every other
    problem is reported in ``diagnostics``.
    """
    config = config or PipelineConfig()
    diags = []
    stages = {}
    if isinstance(image, RasterRGB):
        image = rgb_to_gray(image)
    elif not isinstance(image, GrayImage):
        raise TypeError(f"expected GrayImage or RasterRGB, got {type(image).__name__}")
    stages["01-gray"] = image
    cur = stages["02-mean"] = enhance.mean_filter3(image)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", enhance.DegenerateContrastWarning)
        cur = stages["03-stretch"] = enhance.contrast_stretch(cur, config.p_low, config.p_high)
    diags.extend(f"stretch: {w.message}" for w in caught
                 if issubclass(w.category, enhance.DegenerateContrastWarning))
    cur = stages["04-complement"] = enhance.complement(cur)
    cur = stages["05-dilate"] = enhance.dilate3(cur)
    if config.threshold is not None:
        level = config.threshold
    else:
        hist = enhance.histogram(cur)
        try:
            level = enhance.otsu_level(hist)
        except DegenerateHistogram as exc:
            # a uniform image has no foreground at all
            diags.append(f"binarize: {exc}; treating page as blank")
            level = None
        else:
            eta = enhance.separability(hist, level)
            if eta < config.min_separability:
                diags.append(f"binarize: separability {eta:.2f} below "
                             f"{config.min_separability}; treating page as blank")
                level = None
    if level is None:
        binary = BinaryImage(np.zeros_like(cur.data))
    else:
        binary = enhance.binarize(cur, level)
    stages["06-binary"] = binary.to_gray()

    components = dots.label_components(binary)
    centroids = dots.extract_centroids(components, _dot_filter(config, components))
    dropped = len(components) - len(centroids)
    if dropped:
        diags.append(f"dots: {dropped} of {len(components)} blobs rejected by area filter")
    try:
        geometry = grid.estimate_lattice(
            centroids, config.lattice_mode, dpi=config.dpi, dims=config.dims,
            gap_ratio=config.gap_ratio, snap_tolerance=config.snap_tolerance)
    except RecognitionError as exc:
        raise StageFailure("grid", exc) from exc
    cells = grid.assign_cells(centroids, geometry, config.snap_tolerance)
    diags.extend(f"grid: {d}" for d in cells.diagnostics)
    lines = grid.cells_to_lines(cells)
    doc = codec.decode_lines(lines, config.table)
    diags.extend(f"codec: {d}" for d in doc.diagnostics)
    return PipelineResult(doc, geometry, centroids, lines, diags, stages)
