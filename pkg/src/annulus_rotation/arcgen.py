"""Random hanging-arc configurations for property checks.

``hair`` builds an arc that is a graph over r, hence simple.  ``u_arc`` goes
down one lane, along the bottom below a given level, and up another lane;
each piece is a graph over r or x and the pieces only share their corners.
"""
from __future__ import annotations

import numpy as np

from .arcs import HangingArc, difference_curve


def _params(rng, n):
    t = np.sort(rng.uniform(0.0, 1.0, n - 2))
    t = np.concatenate([[0.0], t, [1.0]])
    if np.any(np.diff(t) <= 0.0):
        return np.linspace(0.0, 1.0, n)
    return t


def _lane(rng, x, width, count):
    return x + rng.uniform(-width, width, count)


def hair(rng, x0: float, depth: float, width: float = 0.1, max_vertices: int = 12) -> HangingArc:
    """Arc from ``(x0, 0)`` down to ``r = depth`` inside ``|x1 - x0| <= width``."""
    n = int(rng.integers(2, max_vertices + 1))
    r = np.concatenate([[0.0], -np.sort(rng.uniform(0.0, -depth, n - 2)), [depth]])
    r = np.unique(r)[::-1]
    x = _lane(rng, x0, width, r.size)
    x[0] = x0
    return HangingArc(np.column_stack([x, r]), _params(rng, r.size), check_simple=False)


def u_arc(rng, base_x: float, land_x: float, bottom: float, land_r: float, width: float = 0.1,
          max_vertices: int = 8) -> HangingArc:
    """Arc from ``(base_x, 0)`` under level ``bottom`` to ``(land_x, land_r)``.

    Lanes have half-width ``width``; the bottom piece stays in ``[bottom - width, bottom]``
    and moves monotonically from the first lane to the second.
    """
    sgn = 1.0 if land_x > base_x else -1.0
    k1, k2, k3 = (int(rng.integers(1, max_vertices)) for _ in range(3))
    # descent: r strictly decreasing from 0 to bottom
    r1 = np.concatenate([[0.0], -np.sort(rng.uniform(0.0, -bottom, k1)), [bottom]])
    r1 = np.unique(r1)[::-1]
    x1 = _lane(rng, base_x, width, r1.size)
    x1[0] = base_x
    # bottom: x strictly monotone toward land_x, r below the corner
    xb = np.sort(rng.uniform(min(x1[-1], land_x), max(x1[-1], land_x), k2))[:: int(sgn)]
    xb = xb[sgn * (xb - x1[-1]) > 0]
    xb = xb[sgn * (land_x - xb) > 0]
    rb = bottom - rng.uniform(1e-3, width, xb.size)
    corner = (land_x, bottom - rng.uniform(1e-3, width))
    # ascent: x on the far side of land_x, r strictly increasing up to land_r
    r3 = np.sort(rng.uniform(corner[1], land_r, k3))
    r3 = r3[(r3 > corner[1]) & (r3 < land_r)]
    x3 = land_x + sgn * rng.uniform(0.0, width, r3.size)
    v = np.concatenate([
        np.column_stack([x1, r1]),
        np.column_stack([xb, rb]),
        [corner],
        np.column_stack([x3, r3]),
        [[land_x + sgn * rng.uniform(0.0, width), land_r]],
    ])
    return HangingArc(v, _params(rng, v.shape[0]), check_simple=False)


def passing_pair(rng, kind: int, width: float = 0.1, floor: float = -2.5):
    """A disjoint pair ``(g, g2)`` with ``(g(0))_1 < (g2(0))_1``.

    kind 1: ``(g2(1))_1 < min (g)_1``, so g2 passes under g.
    kind 2: ``max (g2)_1 < (g(1))_1``, so g passes under g2.

    No vertex goes below ``floor``.
    """
    x0 = rng.uniform(-3.0, 3.0)
    gap = rng.uniform(0.2, 2.0)
    hair_depth = rng.uniform(max(-1.5, floor + 4 * width), -0.2)
    bottom = hair_depth - rng.uniform(2 * width, min(1.0, hair_depth - floor - width))
    land_r = rng.uniform(bottom + 0.01, -0.05)
    if kind == 1:
        g = hair(rng, x0, hair_depth, width)
        g2 = u_arc(rng, x0 + width + gap, x0 - 2 * width - rng.uniform(0.05, 2.0), bottom, land_r, width)
        return g, g2
    if kind == 2:
        g2 = hair(rng, x0, hair_depth, width)
        g = u_arc(rng, x0 - width - gap, x0 + 2 * width + rng.uniform(0.05, 2.0), bottom, land_r, width)
        return g, g2
    raise ValueError("kind must be 1 or 2")


def hair_pair(rng, sep: float, width: float = 0.1, depth_range=(-1.5, -0.2)):
    """Two hairs with bases ``sep`` apart."""
    x0 = rng.uniform(-3.0, 3.0)
    g = hair(rng, x0, rng.uniform(*depth_range), width)
    g2 = hair(rng, x0 + sep, rng.uniform(*depth_range), width)
    return g, g2


def min_matched_distance(g: HangingArc, g2: HangingArc) -> float:
    """``min_t |g2(t) - g(t)|`` over the whole parameter interval (exact for polylines)."""
    _, d = difference_curve(g, g2)
    a, b = d[:-1], d[1:]
    seg = b - a
    L2 = np.einsum("ij,ij->i", seg, seg)
    s = np.clip(-np.einsum("ij,ij->i", a, seg) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    p = a + s[:, None] * seg
    return float(np.min(np.hypot(p[:, 0], p[:, 1])))


def perturb_pair(rng, g: HangingArc, g2: HangingArc, scale: float = 0.4, fix_landing: bool = False):
    """Perturb both arcs on their merged grid by at most ``scale * m`` per vertex.

    ``m`` is the smaller of the minimum matched distance and the horizontal
    separation of the landing points, so the straight-line homotopy keeps the
    arcs apart at matched parameters and keeps the landing points on the same
    side.  Base points move horizontally only; with ``fix_landing`` the
    landing points stay put.
    """
    t, d = difference_curve(g, g2)
    m = min(min_matched_distance(g, g2), abs(d[-1, 0]))
    bound = scale * m
    out = []
    for arc in (g, g2):
        v = arc.at(t)
        ang = rng.uniform(0.0, 2.0 * np.pi, t.size)
        rad = bound * np.sqrt(rng.uniform(0.0, 1.0, t.size))
        eps = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        eps[0, 1] = 0.0
        if fix_landing:
            eps[-1] = 0.0
        w = v + eps
        up = w[1:, 1] >= 0.0
        w[1:, 1] = np.where(up, 0.5 * v[1:, 1], w[1:, 1])
        out.append(HangingArc(w, t, check_simple=False))
    return out[0], out[1]
