"""Cell lattice estimation and assignment of dots to cells.

The page lattice is the product of two 1-D lattices. Along x, dot columns
sit at ``origin_x + k * cell_advance_x + c * dot_pitch`` with c in {0, 1};
along y, dot rows sit at ``origin_y + l * line_advance_y + r * dot_pitch``
with r in {0, 1, 2}. Each axis is fitted on its own by a phase scan that
minimizes a truncated squared snap residual.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit, pick
from .codec import EMPTY, BrailleCell
from .errors import InsufficientDots, NoLatticeFit

__all__ = [
    "BrailleDimensions", "LatticeGeometry", "CellAddress", "CellGridResult",
    "estimate_lattice", "assign_cells", "cells_to_lines", "mm_to_px",
]

MM_PER_INCH = 25.4


def mm_to_px(mm, dpi):
    return mm * dpi / MM_PER_INCH


@dataclass(frozen=True)
class BrailleDimensions:
    """Physical cell dimensions in millimetres."""
    dot_pitch_mm: float = 2.5
    cell_advance_mm: float = 6.0
    line_advance_mm: float = 10.0
    dot_radius_mm: float = 0.75

    def geometry(self, dpi, origin_x=0.0, origin_y=0.0):
        return LatticeGeometry(
            dot_pitch=mm_to_px(self.dot_pitch_mm, dpi),
            cell_advance_x=mm_to_px(self.cell_advance_mm, dpi),
            line_advance_y=mm_to_px(self.line_advance_mm, dpi),
            origin_x=origin_x, origin_y=origin_y)

    def dot_radius_px(self, dpi):
        return mm_to_px(self.dot_radius_mm, dpi)

    @property
    def cell_ratio(self):
        return self.cell_advance_mm / self.dot_pitch_mm

    @property
    def line_ratio(self):
        return self.line_advance_mm / self.dot_pitch_mm


@dataclass(frozen=True)
class LatticeGeometry:
    """Lattice in pixels; the origin is the centre of dot 1 of cell (0, 0)."""
    dot_pitch: float
    cell_advance_x: float
    line_advance_y: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        p = self.dot_pitch
        if not p > 0:
            raise ValueError(f"dot_pitch must be positive, got {p}")
        if not self.cell_advance_x > 2 * p:
            raise ValueError("cell_advance_x must exceed 2 * dot_pitch")
        if not self.line_advance_y > 3 * p:
            raise ValueError("line_advance_y must exceed 3 * dot_pitch")

    def dot_position(self, line, col, dot):
        """Pixel centre of ``dot`` (1..6) in the cell at (line, col)."""
        c, r = divmod(dot - 1, 3)
        return (self.origin_x + col * self.cell_advance_x + c * self.dot_pitch,
                self.origin_y + line * self.line_advance_y + r * self.dot_pitch)

    def with_origin(self, origin_x, origin_y):
        return LatticeGeometry(self.dot_pitch, self.cell_advance_x, self.line_advance_y,
                               float(origin_x), float(origin_y))


@dataclass(frozen=True, order=True)
class CellAddress:
    line: int
    col: int

    def __post_init__(self):
        if self.line < 0 or self.col < 0:
            raise ValueError(f"cell address must be non-negative, got {self}")


@dataclass
class CellGridResult:
    geometry: LatticeGeometry
    cells: dict = field(default_factory=dict)  # CellAddress -> BrailleCell
    diagnostics: list = field(default_factory=list)


# --- 1-D phase scan kernels ------------------------------------------------
# For every candidate phase (each coordinate read as each offset), refine the
# phase twice by the weighted mean inlier residual, then report the phase,
# its truncated cost and the origin shifted so the lowest inlier index is 0.

def _phase_scan_loops(coords, weights, period, offsets, tau):
    m = coords.shape[0]
    k = offsets.shape[0]
    phases = np.empty(m * k)
    costs = np.empty(m * k)
    origins = np.empty(m * k)
    tau2 = tau * tau
    for a in range(m):
        for b in range(k):
            phi = coords[a] - offsets[b]
            for _ in range(2):
                sw = 0.0
                ss = 0.0
                for i in range(m):
                    best = 1e300
                    for j in range(k):
                        d = coords[i] - phi - offsets[j]
                        r = d - period * math.floor(d / period + 0.5)
                        if abs(r) < abs(best):
                            best = r
                    if abs(best) < tau:
                        sw += weights[i]
                        ss += weights[i] * best
                if sw > 0.0:
                    phi += ss / sw
            cost = 0.0
            nmin = 1 << 62
            for i in range(m):
                best = 1e300
                bn = 0
                for j in range(k):
                    d = coords[i] - phi - offsets[j]
                    n = math.floor(d / period + 0.5)
                    r = d - period * n
                    if abs(r) < abs(best):
                        best = r
                        bn = n
                if abs(best) < tau:
                    cost += weights[i] * best * best
                    if bn < nmin:
                        nmin = bn
                else:
                    cost += weights[i] * tau2
            idx = a * k + b
            phases[idx] = phi
            costs[idx] = cost
            origins[idx] = phi + nmin * period if nmin != (1 << 62) else phi
    return phases, costs, origins


def _nearest(coords, phi, period, offsets):
    """Signed residual and lattice index of the nearest site, per coordinate.

    ``coords`` has shape (m,), ``phi`` shape (q,); results are (q, m). Ties
    between offsets go to the first.
    """
    d = coords[None, :, None] - phi[:, None, None] - offsets[None, None, :]
    n = np.floor(d / period + 0.5)
    r = d - period * n
    j = np.argmin(np.abs(r), axis=2)[..., None]
    return (np.take_along_axis(r, j, axis=2)[..., 0],
            np.take_along_axis(n, j, axis=2)[..., 0])


def _phase_scan_numpy(coords, weights, period, offsets, tau):
    phi = (coords[:, None] - offsets[None, :]).ravel()
    for _ in range(2):
        r, _n = _nearest(coords, phi, period, offsets)
        inl = np.abs(r) < tau
        sw = (inl * weights).sum(axis=1)
        ss = (inl * weights * r).sum(axis=1)
        phi = phi + np.divide(ss, sw, out=np.zeros_like(ss), where=sw > 0)
    r, n = _nearest(coords, phi, period, offsets)
    inl = np.abs(r) < tau
    costs = np.where(inl, weights * r * r, weights * tau * tau).sum(axis=1)
    nmin = np.where(inl, n, np.inf).min(axis=1)
    origins = np.where(np.isfinite(nmin), phi + np.where(np.isfinite(nmin), nmin, 0) * period, phi)
    return phi, costs, origins


phase_scan_numba = njit(_phase_scan_loops)
phase_scan_numpy = _phase_scan_numpy
_phase_scan = pick(phase_scan_numba, phase_scan_numpy)

# Two candidates are tied when their costs differ by float noise only.
_TIE_RTOL = 1e-7


def _fit_axis(coords, weights, period, offsets, tau):
    """Best (cost, origin) for one axis.

    Exact ties, such as a lone column of dots that fits either cell column,
    go to the largest normalized origin: the first dot row or column is read
    as dot 1's.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    _, costs, origins = _phase_scan(coords, weights, float(period), offsets, float(tau))
    best = costs.min()
    tied = costs <= best + _TIE_RTOL * max(best, tau * tau)
    return float(best), float(origins[tied].max())


# --- estimation ------------------------------------------------------------

def _cluster_1d(values, tol):
    """Group sorted values into runs whose consecutive gaps are <= tol."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    breaks = np.flatnonzero(np.diff(v) > tol) + 1
    groups = np.split(v, breaks)
    centers = np.array([g.mean() for g in groups])
    counts = np.array([g.size for g in groups], dtype=np.float64)
    return centers, counts


def _nn_distance(xs, ys):
    pts = np.column_stack([xs, ys])
    best = np.full(len(pts), np.inf)
    for start in range(0, len(pts), 512):
        chunk = pts[start:start + 512]
        d = np.hypot(*(chunk[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
        d[np.arange(len(chunk)), np.arange(start, start + len(chunk))] = np.inf
        best[start:start + len(chunk)] = d.min(axis=1)
    return best


def _small_gaps(centers, ratio):
    gaps = np.diff(centers)
    if gaps.size == 0:
        return gaps
    return gaps[gaps < ratio * gaps.min()]


def _search_advance(centers, counts, pitch, offsets, lo, hi, preferred, tau):
    """Grid search the advance in (lo, hi] minimizing the axis fit cost.

    Near-ties (within 5%) go to the advance closest to ``preferred``, which
    resolves under-determined axes such as a page with a single line.
    """
    span = centers.max() - centers.min()
    step = min(0.05 * pitch, 0.2 * pitch * pitch / max(span, pitch))
    grid = np.arange(lo + step, hi + step / 2, step)
    costs = np.array([_fit_axis(centers, counts, adv, offsets, tau)[0] for adv in grid])
    best = costs.min()
    band = costs <= 1.05 * best + 1e-9 * pitch * pitch * counts.sum()
    cand = grid[band]
    return float(cand[np.argmin(np.abs(cand - preferred))])


def _snap(values, origin, period, offsets):
    """Nearest lattice site per value: (residual, cell index, offset index)."""
    d = np.asarray(values, dtype=np.float64)[:, None] - origin - np.asarray(offsets)[None, :]
    n = np.floor(d / period + 0.5)
    r = d - period * n
    j = np.argmin(np.abs(r), axis=1)
    rows = np.arange(len(d))
    return r[rows, j], n[rows, j].astype(np.int64), j


def _refine(xs, ys, geom, tau, fit_cell, fit_line):
    """Least-squares refit of origin, advances and pitch on inlier dots."""
    for _ in range(3):
        p, A, L = geom.dot_pitch, geom.cell_advance_x, geom.line_advance_y
        rx, kx, cx = _snap(xs, geom.origin_x, A, [0.0, p])
        ry, ly, ry_ = _snap(ys, geom.origin_y, L, [0.0, p, 2 * p])
        inl = np.hypot(rx, ry) < tau
        if inl.sum() < 3:
            break
        n = int(inl.sum())
        # unknowns: ox, oy, p, A, L
        rows_x = np.zeros((n, 5))
        rows_x[:, 0] = 1
        rows_x[:, 2] = cx[inl]
        rows_x[:, 3] = kx[inl]
        rows_y = np.zeros((n, 5))
        rows_y[:, 1] = 1
        rows_y[:, 2] = ry_[inl]
        rows_y[:, 4] = ly[inl]
        M = np.vstack([rows_x, rows_y])
        b = np.concatenate([xs[inl], ys[inl]])
        keep = [0, 1, 2, 3, 4]
        fixed = np.zeros(5)
        # advances with no spread in the data stay as estimated
        if not fit_cell or np.ptp(kx[inl]) == 0:
            keep.remove(3)
            fixed[3] = A
        if not fit_line or np.ptp(ly[inl]) == 0:
            keep.remove(4)
            fixed[4] = L
        if np.ptp(cx[inl]) == 0 and np.ptp(ry_[inl]) == 0:
            keep.remove(2)
            fixed[2] = p
        sol, *_ = np.linalg.lstsq(M[:, keep], b - M @ fixed, rcond=None)
        full = fixed.copy()
        full[keep] = sol
        try:
            geom = LatticeGeometry(*(float(v) for v in full[[2, 3, 4, 0, 1]]))
        except ValueError as exc:
            raise NoLatticeFit(f"lattice refinement diverged: {exc}") from None
    return geom


def _normalize_origin(xs, ys, geom, tau):
    """Shift the origin by whole cells so the first inlier line and column are 0."""
    p = geom.dot_pitch
    rx, kx, _ = _snap(xs, geom.origin_x, geom.cell_advance_x, [0.0, p])
    ry, ly, _ = _snap(ys, geom.origin_y, geom.line_advance_y, [0.0, p, 2 * p])
    inl = np.hypot(rx, ry) < tau
    if not inl.any():
        return geom, inl
    return geom.with_origin(geom.origin_x + kx[inl].min() * geom.cell_advance_x,
                            geom.origin_y + ly[inl].min() * geom.line_advance_y), inl


def estimate_lattice(centroids, mode="calibrated", dpi=300.0, dims=BrailleDimensions(),
                     gap_ratio=1.5, snap_tolerance=0.35):
    """Fit the cell lattice to dot centroids.

    ``mode="calibrated"`` takes pitch and advances from ``dims`` at ``dpi``
    and fits only the origin. ``mode="auto"`` estimates everything from the
    dots: the pitch from the small gaps between dot-row clusters, the
    advances by a grid search, followed by a joint least-squares refit.
    """
    xs = np.array([c.x for c in centroids], dtype=np.float64)
    ys = np.array([c.y for c in centroids], dtype=np.float64)
    if mode == "calibrated":
        if dpi is None or not dpi > 0:
            raise ValueError("calibrated mode needs a positive dpi")
        if len(xs) < 1:
            raise InsufficientDots("no dots found")
        geom = dims.geometry(dpi)
        tau = snap_tolerance * geom.dot_pitch
        ones = np.ones_like(xs)
        _, ox = _fit_axis(xs, ones, geom.cell_advance_x, [0.0, geom.dot_pitch], tau)
        _, oy = _fit_axis(ys, ones, geom.line_advance_y,
                          [0.0, geom.dot_pitch, 2 * geom.dot_pitch], tau)
        geom, _ = _normalize_origin(xs, ys, geom.with_origin(ox, oy), tau)
        return geom
    if mode != "auto":
        raise ValueError(f"unknown lattice mode {mode!r}")
    return _estimate_auto(xs, ys, dims, gap_ratio, snap_tolerance)


def _estimate_auto(xs, ys, dims, gap_ratio, snap_tolerance):
    if len(xs) < 6:
        raise InsufficientDots(f"auto lattice needs >= 6 dots, found {len(xs)}")
    tol = 0.3 * float(np.median(_nn_distance(xs, ys)))
    cx, wx = _cluster_1d(xs, tol)
    cy, wy = _cluster_1d(ys, tol)
    if len(cx) < 2 or len(cy) < 2:
        raise InsufficientDots("auto lattice needs dots in >= 2 rows and >= 2 columns")
    small = _small_gaps(cy, gap_ratio)
    if small.size == 0:
        small = _small_gaps(cx, gap_ratio)
    if small.size == 0 or not small.min() > 0:
        raise NoLatticeFit("no within-cell dot gaps found")
    p = float(np.median(small))
    tau = snap_tolerance * p
    A = _search_advance(cx, wx, p, [0.0, p], 2 * p, 5 * p, dims.cell_ratio * p, tau)
    # near 3p the row lattice is uniform and fits any rows; keep a clear gap
    L = _search_advance(cy, wy, p, [0.0, p, 2 * p], 3 * p + 2 * tau, 8 * p,
                        dims.line_ratio * p, tau)
    _, ox = _fit_axis(cx, wx, A, [0.0, p], tau)
    _, oy = _fit_axis(cy, wy, L, [0.0, p, 2 * p], tau)
    geom = LatticeGeometry(p, A, L, ox, oy)
    geom = _refine(xs, ys, geom, tau, fit_cell=True, fit_line=True)
    tau = snap_tolerance * geom.dot_pitch
    geom, inl = _normalize_origin(xs, ys, geom, tau)
    if inl.mean() < 0.5:
        raise NoLatticeFit(f"only {inl.sum()} of {len(xs)} dots fit the lattice")
    return geom


# --- assignment ------------------------------------------------------------

def assign_cells(centroids, geometry, snap_tolerance=0.35):
    """Snap each centroid to its nearest lattice dot and set that cell bit.

    Dots farther than ``snap_tolerance * dot_pitch`` from every site, dots
    before the origin, and second dots on an occupied site are reported in
    ``diagnostics`` instead of being assigned.
    """
    if not 0 < snap_tolerance <= 0.5:
        raise ValueError(f"snap_tolerance must be in (0, 0.5], got {snap_tolerance}")
    g = geometry
    p = g.dot_pitch
    result = CellGridResult(g)
    if not centroids:
        return result
    xs = np.array([c.x for c in centroids], dtype=np.float64)
    ys = np.array([c.y for c in centroids], dtype=np.float64)
    rx, col, cc = _snap(xs, g.origin_x, g.cell_advance_x, [0.0, p])
    ry, line, rr = _snap(ys, g.origin_y, g.line_advance_y, [0.0, p, 2 * p])
    resid = np.hypot(rx, ry)
    masks = {}
    taken = {}
    for i, c in enumerate(centroids):
        where = f"dot at ({c.x:.1f}, {c.y:.1f})"
        if resid[i] > snap_tolerance * p:
            result.diagnostics.append(
                f"unassigned {where}: snap residual {resid[i]:.2f} px exceeds "
                f"{snap_tolerance * p:.2f} px")
            continue
        if line[i] < 0 or col[i] < 0:
            result.diagnostics.append(f"unassigned {where}: lies before the lattice origin")
            continue
        addr = CellAddress(int(line[i]), int(col[i]))
        dot = 3 * int(cc[i]) + int(rr[i]) + 1
        if (addr, dot) in taken:
            j = taken[addr, dot]
            result.diagnostics.append(
                f"duplicate {where}: dot {dot} of cell (line {addr.line}, col {addr.col}) "
                f"already taken by dot at ({centroids[j].x:.1f}, {centroids[j].y:.1f})")
            continue
        taken[addr, dot] = i
        masks[addr] = masks.get(addr, 0) | 1 << (dot - 1)
    result.cells = {a: BrailleCell(m) for a, m in sorted(masks.items())}
    return result


def cells_to_lines(result):
    """Arrange populated cells into lines with explicit blank cells.

    Each line spans its first to last populated column. Lines are numbered
    from the first populated one; blank lines in between become empty lists.
    """
    if not result.cells:
        return []
    by_line = {}
    for addr, cell in result.cells.items():
        if cell:
            by_line.setdefault(addr.line, {})[addr.col] = cell
    if not by_line:
        return []
    lines = []
    for li in range(min(by_line), max(by_line) + 1):
        row = by_line.get(li)
        if not row:
            lines.append([])
            continue
        lines.append([row.get(c, EMPTY) for c in range(min(row), max(row) + 1)])
    return lines
