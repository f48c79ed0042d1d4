"""Time the numba kernels against their pure-numpy fallbacks.

    python benchmarks/bench_backends.py [--repeat N] [--dpi D]

Both variants are always importable here regardless of OBR_BACKEND; the
flag only decides which one the package calls. Numba compile time is
excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from obr import dots, enhance, grid, synth
from obr._accel import HAVE_NUMBA
from obr.codec import english_grade1_table
from obr.pipeline import PipelineConfig, run_pipeline

TEXT = "\n".join(["the quick brown fox jumps over the lazy dog"] * 4)


def _best(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dpi", type=float, default=300.0)
    args = ap.parse_args(argv)

    cfg = synth.SynthConfig(dpi=args.dpi, noise_sigma=8.0, seed=1)
    page, _ = synth.render_page(synth.encode_text(TEXT, english_grade1_table()), cfg)
    res = run_pipeline(page, PipelineConfig(dpi=args.dpi))
    gray = np.ascontiguousarray(page.data)
    binary = np.ascontiguousarray(res.stages["06-binary"].data > 0).astype(np.uint8)
    xs = np.array([c.x for c in res.centroids])
    w = np.ones_like(xs)
    geo = res.geometry
    offsets = np.array([0.0, geo.dot_pitch])
    tau = 0.35 * geo.dot_pitch

    cases = [
        ("mean3", enhance.mean3_numba, enhance.mean3_numpy, (gray,)),
        ("dilate3", enhance.dilate3_numba, enhance.dilate3_numpy, (gray,)),
        ("label", dots.label_numba, dots.label_numpy, (binary,)),
        ("phase_scan", grid.phase_scan_numba, grid.phase_scan_numpy,
         (xs, w, geo.cell_advance_x, offsets, tau)),
    ]
    print(f"page {page.width}x{page.height} px, {len(xs)} dots, best of {args.repeat}")
    print(f"{'kernel':<12}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fast, slow, kargs in cases:
        t_np = _best(slow, kargs, args.repeat)
        if HAVE_NUMBA and fast is not None:
            t_nb = _best(fast, kargs, args.repeat)
            print(f"{name:<12}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<12}{'n/a':>12}{1e3 * t_np:>12.2f}{'':>10}")


if __name__ == "__main__":
    main()
