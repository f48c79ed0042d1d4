"""Connected components of the binary image and dot centroid extraction."""
import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit, pick

__all__ = [
    "Component", "DotCentroid", "DotFilter",
    "label_components", "extract_centroids", "default_dot_filter",
]


@dataclass(frozen=True, eq=False)
class Component:
    """One 8-connected foreground region.

    ``xs`` and ``ys`` list member pixel coordinates in raster order.
    """
    xs: np.ndarray
    ys: np.ndarray
    area: int
    x: float
    y: float

    @property
    def bbox(self):
        """(min_x, min_y, max_x, max_y), inclusive."""
        return (int(self.xs.min()), int(self.ys.min()),
                int(self.xs.max()), int(self.ys.max()))


@dataclass(frozen=True)
class DotCentroid:
    x: float
    y: float
    area: int = 1

    def __post_init__(self):
        if self.area < 1:
            raise ValueError(f"dot area must be >= 1, got {self.area}")


@dataclass(frozen=True)
class DotFilter:
    area_min: int = 3
    area_max: int = 10**9

    def __post_init__(self):
        if not 1 <= self.area_min <= self.area_max:
            raise ValueError(f"need 1 <= area_min <= area_max, got "
                             f"{self.area_min}, {self.area_max}")

    def accepts(self, area):
        return self.area_min <= area <= self.area_max


def default_dot_filter(dot_radius_px):
    """Area window for dots of the expected radius.

    Keeps blobs between a fifth and five times the ideal disk area, which
    drops speckle and merged blobs.
    """
    disk = math.pi * dot_radius_px ** 2
    return DotFilter(max(3, round(0.2 * disk)), max(3, round(5 * disk)))


# --- labeling kernels ------------------------------------------------------
# Both kernels return, for every pixel, the flat index of the first pixel
# (raster order) of its component, or -1 for background.

def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


_find_jit = njit(_find)


def _make_label_loops(find):
    def label_loops(mask):
        h, w = mask.shape
        parent = np.full(h * w, -1, np.int64)
        for i in range(h):
            for j in range(w):
                if mask[i, j] == 0:
                    continue
                p = i * w + j
                parent[p] = p
                # already-visited 8-neighbours: W, NW, N, NE
                for di, dj in ((0, -1), (-1, -1), (-1, 0), (-1, 1)):
                    ii = i + di
                    jj = j + dj
                    if ii < 0 or jj < 0 or jj >= w or mask[ii, jj] == 0:
                        continue
                    a = find(parent, p)
                    b = find(parent, ii * w + jj)
                    if a < b:
                        parent[b] = a
                    elif b < a:
                        parent[a] = b
        out = np.full(h * w, -1, np.int64)
        for p in range(h * w):
            if parent[p] >= 0:
                out[p] = find(parent, p)
        return out.reshape(h, w)
    return label_loops


def _label_numpy(mask):
    """Min-label propagation with pointer jumping."""
    h, w = mask.shape
    fg = mask.astype(bool)
    big = h * w
    lab = np.where(fg, np.arange(h * w).reshape(h, w), big)
    flat_fg = fg.ravel()
    while True:
        padded = np.pad(lab, 1, constant_values=big)
        m = lab.copy()
        for di in range(3):
            for dj in range(3):
                np.minimum(m, padded[di:di + h, dj:dj + w], out=m)
        m[~fg] = big
        # jump: every label is a foreground index, follow it to its own label
        flat = m.ravel()
        sel = flat[flat_fg]
        while True:
            jumped = flat[sel]
            if np.array_equal(jumped, sel):
                break
            sel = jumped
            flat[flat_fg] = sel
        if np.array_equal(m, lab):
            break
        lab = m
    return np.where(fg, lab, -1).astype(np.int64)


label_numba = None
if _find_jit is not None:
    label_numba = njit(_make_label_loops(_find_jit))
label_numpy = _label_numpy
_label = pick(label_numba, label_numpy)


def label_components(image):
    """Partition the 1-pixels of a binary image into 8-connected components.

    Components come back ordered by (min y, min x) of their pixel sets,
    ties broken by the first pixel in raster order. Centroids are the mean
    member pixel coordinates, ``x`` being the column.
    """
    roots = _label(np.ascontiguousarray(image.data)).ravel()
    members = np.flatnonzero(roots >= 0)
    if members.size == 0:
        return []
    w = image.width
    # stable sort by root keeps raster order inside each component
    order = np.argsort(roots[members], kind="stable")
    members = members[order]
    uniq, starts, areas = np.unique(roots[members], return_index=True, return_counts=True)
    ys_all, xs_all = np.divmod(members, w)
    comps = []
    for start, area, root in zip(starts, areas, uniq):
        xs = xs_all[start:start + area]
        ys = ys_all[start:start + area]
        key = (int(ys[0]), int(xs.min()), int(root))
        comps.append((key, Component(xs, ys, int(area), float(xs.mean()), float(ys.mean()))))
    comps.sort(key=lambda kc: kc[0])
    return [c for _, c in comps]


def extract_centroids(components, dot_filter=DotFilter()):
    """Centroids of components whose area passes ``dot_filter``, order kept."""
    return [DotCentroid(c.x, c.y, c.area) for c in components if dot_filter.accepts(c.area)]
