"""Optical Braille recognition for scanned single-sided embossed pages.

The recognition chain is raster -> enhance -> dots -> grid -> codec; see
:func:`obr.pipeline.run_pipeline`. :mod:`obr.synth` renders pages with
known content for testing.
"""
from ._accel import BACKEND
from .codec import (BrailleCell, CodeTable, DecodedDocument, decode_lines,
                    english_grade1_table, malayalam_vowel_table, table_for, to_unicode_braille)
from .grid import BrailleDimensions, LatticeGeometry, assign_cells, cells_to_lines, estimate_lattice
from .pipeline import PipelineConfig, run_pipeline
from .raster import BinaryImage, GrayImage, RasterRGB, load_pnm, read_pnm, save_pnm, write_pnm
from .synth import SynthConfig, encode_text, render_page

__version__ = "0.1.0"
