"""Command-line front end.

    obr decode PAGE.pgm [...] [--lang en|ml | --table FILE] [--dpi N] [--auto-grid]
               [--threshold N] [--dump DIR]
    obr synth (--text FILE | --string S) [--lang ...] [--dpi N] [--noise S]
              [--jitter J] [--seed K] -o OUT.pgm [--truth OUT.txt]
    obr tables --lang X

Exit status is 0 on success, 1 for file or format problems and 2 when a
page cannot be recognized.
"""
import argparse
import os
import sys
from pathlib import Path

from . import codec, synth
from .errors import FormatError, ObrError, RecognitionError, UnencodableGrapheme
from .grid import BrailleDimensions, mm_to_px
from .pipeline import STAGE_NAMES, PipelineConfig, run_pipeline
from .raster import read_pnm, write_pnm

EXIT_OK, EXIT_INPUT, EXIT_RECOGNITION = 0, 1, 2


def _default_lang():
    return os.environ.get("OBR_DEFAULT_LANG", "en")


def _err(msg):
    print(f"obr: {msg}", file=sys.stderr)


def _add_table_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lang", default=None,
                   help="built-in table: en (Grade-1 letters) or ml (Malayalam vowels); "
                        "default from OBR_DEFAULT_LANG or en")
    g.add_argument("--table", type=Path, metavar="FILE",
                   help="custom table, one '<bits>\\t<grapheme>' per line")


def _table(args):
    if args.table is not None:
        return codec.load_table(args.table)
    return codec.table_for(args.lang or _default_lang())


def _add_dims_args(p):
    d = BrailleDimensions()
    p.add_argument("--pitch-mm", type=float, default=d.dot_pitch_mm, help="within-cell dot pitch")
    p.add_argument("--cell-mm", type=float, default=d.cell_advance_mm, help="cell advance")
    p.add_argument("--line-mm", type=float, default=d.line_advance_mm, help="line advance")


def _dims(args, **extra):
    return BrailleDimensions(args.pitch_mm, args.cell_mm, args.line_mm, **extra)


def build_parser():
    parser = argparse.ArgumentParser(prog="obr", description="Optical Braille recognition.")
    sub = parser.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("decode", help="decode scanned Braille page images (PGM/PPM)")
    dec.add_argument("inputs", nargs="+", type=Path, metavar="IMAGE")
    _add_table_args(dec)
    dec.add_argument("--dpi", type=float, help="scan resolution (default 300 for the calibrated grid)")
    dec.add_argument("--auto-grid", action="store_true",
                     help="estimate the lattice from the dots instead of from --dpi")
    dec.add_argument("--threshold", type=int, help="fixed binarization level 0..254 instead of Otsu")
    dec.add_argument("--min-separability", type=float, default=0.8,
                     help="Otsu separability below which the page counts as blank")
    dec.add_argument("--p-low", type=float, default=1.0, help="contrast stretch low percentile")
    dec.add_argument("--p-high", type=float, default=99.0, help="contrast stretch high percentile")
    dec.add_argument("--snap-tolerance", type=float, default=0.35,
                     help="max snap distance as a fraction of the dot pitch")
    dec.add_argument("--gap-ratio", type=float, default=1.5,
                     help="auto grid: gaps under this multiple of the smallest count as within-cell")
    dec.add_argument("--area-min", type=int, help="smallest accepted dot area in pixels")
    dec.add_argument("--area-max", type=int, help="largest accepted dot area in pixels")
    dec.add_argument("--dump", type=Path, metavar="DIR", help="write intermediate stages as PGM")
    _add_dims_args(dec)

    syn = sub.add_parser("synth", help="render a synthetic Braille page")
    src = syn.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", type=Path, metavar="FILE", help="UTF-8 text file")
    src.add_argument("--string", metavar="S", help="text given inline")
    _add_table_args(syn)
    syn.add_argument("--dpi", type=float, default=300.0)
    syn.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma in gray levels")
    syn.add_argument("--jitter", type=float, default=0.0,
                     help="max dot displacement per axis, as a fraction of the dot pitch")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--radius", type=float, help="dot radius in px (default from --dot-mm)")
    syn.add_argument("--dot-mm", type=float, default=BrailleDimensions().dot_radius_mm,
                     help="dot radius in mm")
    syn.add_argument("--margin", type=float, default=40.0, help="page margin in px")
    syn.add_argument("-o", "--output", type=Path, required=True, metavar="OUT.pgm")
    syn.add_argument("--truth", type=Path, metavar="OUT.txt",
                     help="write true dot centres as 'x y area' lines")
    _add_dims_args(syn)

    tab = sub.add_parser("tables", help="print a code table")
    _add_table_args(tab)
    return parser


def cmd_decode(args):
    try:
        table = _table(args)
    except (OSError, FormatError) as exc:
        _err(f"table: {exc}")
        return EXIT_INPUT
    config = PipelineConfig(
        table=table, dpi=args.dpi,
        lattice_mode="auto" if args.auto_grid else "calibrated",
        threshold=args.threshold, p_low=args.p_low, p_high=args.p_high,
        snap_tolerance=args.snap_tolerance, area_min=args.area_min, area_max=args.area_max,
        dims=_dims(args), gap_ratio=args.gap_ratio,
        min_separability=args.min_separability)
    status = EXIT_OK
    for path in args.inputs:
        try:
            image = read_pnm(path)
        except (OSError, FormatError) as exc:
            _err(f"{path}: load: {exc}")
            status = max(status, EXIT_INPUT)
            continue
        try:
            result = run_pipeline(image, config)
        except RecognitionError as exc:
            _err(f"{path}: {exc}")
            status = max(status, EXIT_RECOGNITION)
            continue
        if args.dump is not None:
            out = args.dump if len(args.inputs) == 1 else args.dump / path.stem
            out.mkdir(parents=True, exist_ok=True)
            for name in STAGE_NAMES:
                write_pnm(out / f"{name}.pgm", result.stages[name])
        for d in result.diagnostics:
            _err(f"{path}: {d}")
        sys.stdout.write(result.text + "\n")
    sys.stdout.flush()
    return status


def cmd_synth(args):
    try:
        table = _table(args)
        text = args.string if args.string is not None else args.text.read_text(encoding="utf-8")
    except (OSError, FormatError, UnicodeDecodeError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    text = text.replace("\r\n", "\n").rstrip("\n")
    try:
        cells = synth.encode_text(text, table)
    except UnencodableGrapheme as exc:
        _err(f"UnencodableGrapheme: {exc}")
        return EXIT_INPUT
    dims = _dims(args, dot_radius_mm=args.dot_mm)
    pitch = mm_to_px(dims.dot_pitch_mm, args.dpi)
    try:
        config = synth.SynthConfig(
            dpi=args.dpi, dims=dims, dot_radius=args.radius, noise_sigma=args.noise,
            jitter=args.jitter * pitch, margin=args.margin, seed=args.seed)
        image, truth = synth.render_page(cells, config)
    except (ObrError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    write_pnm(args.output, image)
    if args.truth is not None:
        args.truth.write_text(synth.format_truth(truth), encoding="utf-8")
    _err(f"wrote {args.output}: {image.width}x{image.height} px, {len(truth)} dots")
    return EXIT_OK


def cmd_tables(args):
    try:
        table = _table(args)
    except (OSError, FormatError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    for cell, grapheme, alias in table.rows():
        line = f"{cell.bits} {codec.to_unicode_braille(cell)} {grapheme}"
        sys.stdout.write(line + (" (alias)\n" if alias else "\n"))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"decode": cmd_decode, "synth": cmd_synth, "tables": cmd_tables}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
