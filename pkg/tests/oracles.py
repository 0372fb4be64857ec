"""Slow, loop-based reference computations used to check the vectorized code.

Nothing here imports from poseclone; inputs are plain lists / arrays.
"""
import math


def pose_distance(a, b):
    """Average limb distance of two fully valid descriptors given as lists of (dx, dy)."""
    total = 0.0
    for (ax, ay), (bx, by) in zip(a, b):
        total += math.sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by))
    return total / len(a)


def pose_to_sequence(p, v, p_valid=None, v_valid=None):
    """Exhaustive per-limb nearest neighbor search.

    Returns (distance, per-limb minima, per-limb argmin frames); limbs without
    any candidate get None entries.
    """
    n_limbs = len(p)
    p_valid = p_valid or [True] * n_limbs
    v_valid = v_valid or [[True] * n_limbs for _ in v]
    mins, args = [], []
    for l in range(n_limbs):
        best, best_j = None, None
        if p_valid[l]:
            for j, frame in enumerate(v):
                if not v_valid[j][l]:
                    continue
                dx = p[l][0] - frame[l][0]
                dy = p[l][1] - frame[l][1]
                d = math.sqrt(dx * dx + dy * dy)
                if best is None or d < best:
                    best, best_j = d, j
        mins.append(best)
        args.append(best_j)
    used = [m for m in mins if m is not None]
    return sum(used) / len(used), mins, args


def bilinear_warp(image, flow):
    """Per-pixel backward warp with border clamping. image is H x W x C (nested
    indexable), flow is H x W x 2. Returns a nested list."""
    h, w = len(image), len(image[0])
    out = []
    for y in range(h):
        row = []
        for x in range(w):
            sx = min(max(x + flow[y][x][0], 0.0), w - 1.0)
            sy = min(max(y + flow[y][x][1], 0.0), h - 1.0)
            x0 = int(math.floor(sx))
            y0 = int(math.floor(sy))
            x1 = min(x0 + 1, w - 1)
            y1 = min(y0 + 1, h - 1)
            ax = sx - x0
            ay = sy - y0
            px = []
            for c in range(len(image[0][0])):
                v = ((1 - ax) * (1 - ay) * image[y0][x0][c]
                     + ax * (1 - ay) * image[y0][x1][c]
                     + (1 - ax) * ay * image[y1][x0][c]
                     + ax * ay * image[y1][x1][c])
                px.append(v)
            row.append(px)
        out.append(row)
    return out


def point_segment_distance(px, py, ax, ay, bx, by):
    """Distance from a point to a segment: the closer of the endpoints, or the
    perpendicular foot when it falls inside the segment."""
    ex, ey = bx - ax, by - ay
    best = min(math.hypot(px - ax, py - ay), math.hypot(px - bx, py - by))
    length = math.hypot(ex, ey)
    if length == 0:
        return best
    along = ((px - ax) * ex + (py - ay) * ey) / length
    if 0 <= along <= length:
        best = min(best, abs((px - ax) * ey - (py - ay) * ex) / length)
    return best


def mse(a, b):
    total = 0.0
    count = 0
    for fa, fb in zip(a, b):
        for ra, rb in zip(fa, fb):
            for pa, pb in zip(ra, rb):
                for ca, cb in zip(pa, pb):
                    total += (float(ca) - float(cb)) ** 2
                    count += 1
    return total / count


def channel_moments(values):
    """Two-pass population mean and variance of a flat list."""
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, var
