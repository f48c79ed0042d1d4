"""Brute-force reference implementations used only by the tests.

These deliberately share no code with the package: plain Python loops,
exact rational arithmetic and BFS flood fill.
"""
from collections import deque
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction


def gray_reference(r, g, b):
    v = Decimal("0.2989") * r + Decimal("0.5870") * g + Decimal("0.1140") * b
    return min(255, max(0, int(v.quantize(Decimal(1), rounding=ROUND_HALF_UP))))


def _clamped_window(img, i, j):
    h, w = len(img), len(img[0])
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            yield img[min(max(i + di, 0), h - 1)][min(max(j + dj, 0), w - 1)]


def mean3_reference(img):
    """img: list of lists of ints."""
    out = []
    for i in range(len(img)):
        row = []
        for j in range(len(img[0])):
            m = Fraction(sum(_clamped_window(img, i, j)), 9)
            row.append(int(m + Fraction(1, 2)))
        out.append(row)
    return out


def dilate3_reference(img):
    return [[max(_clamped_window(img, i, j)) for j in range(len(img[0]))]
            for i in range(len(img))]


def otsu_reference(counts):
    """Smallest t maximizing w0*w1*(mu0-mu1)**2, by exhaustive search."""
    total = sum(counts)
    best_t, best_v = None, None
    for t in range(255):
        n0 = sum(counts[:t + 1])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            v = Fraction(0)
        else:
            mu0 = Fraction(sum(i * counts[i] for i in range(t + 1)), n0)
            mu1 = Fraction(sum(i * counts[i] for i in range(t + 1, 256)), n1)
            v = Fraction(n0, total) * Fraction(n1, total) * (mu0 - mu1) ** 2
        if best_v is None or v > best_v:
            best_t, best_v = t, v
    return best_t


def flood_fill_components(mask):
    """8-connected components as sorted pixel lists [(y, x), ...].

    Components are returned sorted by (min y, min x, first raster pixel).
    """
    h, w = len(mask), len(mask[0])
    seen = [[False] * w for _ in range(h)]
    comps = []
    for y in range(h):
        for x in range(w):
            if not mask[y][x] or seen[y][x]:
                continue
            seen[y][x] = True
            queue = deque([(y, x)])
            pix = []
            while queue:
                cy, cx = queue.popleft()
                pix.append((cy, cx))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = cy + dy, cx + dx
                        if 0 <= ny < h and 0 <= nx < w and mask[ny][nx] and not seen[ny][nx]:
                            seen[ny][nx] = True
                            queue.append((ny, nx))
            comps.append(sorted(pix))
    comps.sort(key=lambda p: (p[0][0], min(x for _, x in p), p[0]))
    return comps
