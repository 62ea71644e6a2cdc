"""Hanging arcs and their relative winding number.

A hanging arc is a simple polyline in the cover that starts on the boundary
r = 0 and otherwise stays in r < 0.  Each vertex carries a parameter in
[0, 1]; two arcs are compared at equal parameters.

Winding numbers are measured in **half-turns**: the direction of
``g2(t) - g(t)`` is lifted through ``x -> exp(i pi x)``, so one full turn of
the difference vector contributes +-2.  An integer value therefore means the
landing points sit on a common horizontal line.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cover import FullMap, LiftPoint, OrbitSource, require_full
from .errors import HalfIntegerError, IntersectionError, PreconditionError

ARC_HEADER = "hanging-arc v1"


class HangingArc:
    """Polyline arc ``vertices[i]`` at parameter ``params[i]``.

    ``vertices`` is an ``(n, 2)`` array of ``(x1, r)``.  When ``params`` is
    omitted the vertices are spread uniformly over [0, 1].
    """

    __slots__ = ("vertices", "params")

    def __init__(self, vertices, params=None, check_simple=True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise PreconditionError("a hanging arc needs at least two (x1, r) vertices")
        if params is None:
            t = np.linspace(0.0, 1.0, v.shape[0])
        else:
            t = np.array(params, dtype=float)
        if t.shape != (v.shape[0],):
            raise PreconditionError("one parameter per vertex is required")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0.0):
            raise PreconditionError("parameters must increase strictly from 0 to 1")
        if not np.all(np.isfinite(v)):
            raise PreconditionError("vertices must be finite")
        if v[0, 1] != 0.0:
            raise PreconditionError(f"arc must start on the boundary r = 0, got r = {v[0, 1]!r}")
        if np.any(v[1:, 1] >= 0.0):
            raise PreconditionError("only the first vertex may lie on the boundary")
        v.setflags(write=False)
        t.setflags(write=False)
        self.vertices = v
        self.params = t
        if check_simple and not self.is_simple():
            raise IntersectionError("polyline is not simple")

    def __len__(self):
        return self.vertices.shape[0]

    def __repr__(self):
        return f"HangingArc(n={len(self)}, base={self.base}, landing={self.landing})"

    @property
    def base(self) -> LiftPoint:
        return LiftPoint(float(self.vertices[0, 0]), 0.0)

    @property
    def landing(self) -> LiftPoint:
        return LiftPoint(float(self.vertices[-1, 0]), float(self.vertices[-1, 1]))

    def is_simple(self) -> bool:
        i, _ = kernels.first_crossing(self.vertices, self.vertices, same=True)
        return i < 0

    def at(self, t) -> np.ndarray:
        """Points at parameters ``t`` (linear between vertices), shape ``(..., 2)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.params, self.vertices[:, 0]),
                         np.interp(t, self.params, self.vertices[:, 1])], axis=-1)

    def deck(self, k: int = 1) -> "HangingArc":
        return HangingArc(self.vertices + np.array([k, 0.0]), self.params, check_simple=False)

    def reparameterized(self, phi) -> "HangingArc":
        """Same polyline with parameters ``phi(params)``; ``phi`` strictly increasing, fixing 0 and 1."""
        t = np.asarray(phi(self.params), dtype=float)
        t[0], t[-1] = 0.0, 1.0
        return HangingArc(self.vertices, t, check_simple=False)

    def resampled(self, t) -> "HangingArc":
        """Insert vertices at parameters ``t`` without changing the curve."""
        t = np.union1d(self.params, np.clip(np.asarray(t, dtype=float), 0.0, 1.0))
        return HangingArc(self.at(t), t, check_simple=False)


@dataclass(frozen=True)
class Disjointness:
    disjoint: bool
    disjoint_except_landing: bool
    crossing: tuple[int, int] = (-1, -1)

    def __bool__(self):
        return self.disjoint


def arcs_disjoint(g: HangingArc, g2: HangingArc) -> Disjointness:
    """Segment-level disjointness test.

    Arcs that meet only at a common landing point are reported with
    ``disjoint=False, disjoint_except_landing=True``.
    """
    a, b = g.vertices, g2.vertices
    shared = bool(np.array_equal(a[-1], b[-1]))
    if not shared:
        hit = kernels.first_crossing(a, b)
        return Disjointness(hit[0] < 0, False, hit)
    last = (a.shape[0] - 2, b.shape[0] - 2)
    hit = kernels.first_crossing(a, b, skip=last)
    if hit[0] >= 0:
        return Disjointness(False, False, hit)
    u = a[-2] - a[-1]
    v = b[-2] - b[-1]
    overlap = u[0] * v[1] - u[1] * v[0] == 0.0 and float(np.dot(u, v)) > 0.0
    return Disjointness(False, not overlap, last if overlap else (-1, -1))


@dataclass(frozen=True)
class WindingResult:
    w: float
    nearest_int: int | None
    refinement_depth: int


def nearest_integer(a: float, tie_tol: float = 1e-6) -> int:
    """Closest integer to ``a``; undefined (raises) within ``tie_tol`` of 1/2 + Z."""
    a = float(a)
    if abs(a - (math.floor(a) + 0.5)) <= tie_tol:
        raise HalfIntegerError(f"{a!r} is within {tie_tol:g} of a half-integer")
    return int(math.floor(a + 0.5))


def difference_curve(g: HangingArc, g2: HangingArc):
    """Merged parameter grid and ``g2(t) - g(t)`` on it."""
    t = np.union1d(g.params, g2.params)
    d = g2.at(t) - g.at(t)
    return t, d


def relative_winding(g: HangingArc, g2: HangingArc, tol: float = 1e-12, tie_tol: float = 1e-6,
                     max_depth: int = 32) -> WindingResult:
    """Relative winding number ``w(g, g2)`` in half-turns.

    Requires ``(g(0))_1 < (g2(0))_1`` and ``g(t) != g2(t)`` at matched
    parameters.  A shared landing point is allowed: the final parameter is
    then left out, which does not change the lifted angle because the last
    piece of the difference curve is a segment shrinking onto the origin.
    """
    if not g.vertices[0, 0] < g2.vertices[0, 0]:
        raise PreconditionError("base points out of order: need (g(0))_1 < (g2(0))_1")
    _, d = difference_curve(g, g2)
    if d[-1, 0] == 0.0 and d[-1, 1] == 0.0:
        d = d[:-1]
    w, depth, status = kernels.unwrap_winding(d[:, 0], d[:, 1], tol, max_depth)
    if status:
        raise IntersectionError("arcs coincide at matched parameters")
    try:
        k = nearest_integer(w, tie_tol)
    except HalfIntegerError:
        k = None
    return WindingResult(w=w, nearest_int=k, refinement_depth=depth)


def lead_line_extrema(g: HangingArc) -> tuple[float, float]:
    x = g.vertices[:, 0]
    return float(x.min()), float(x.max())


def compare_by_base(g: HangingArc, g2: HangingArc) -> int:
    """-1 if ``g`` lies before ``g2`` in the base-point order, +1 if after."""
    dj = arcs_disjoint(g, g2)
    if not (dj.disjoint or dj.disjoint_except_landing):
        raise IntersectionError("order is undefined for intersecting arcs")
    a, b = g.vertices[0, 0], g2.vertices[0, 0]
    if a == b:
        raise IntersectionError("arcs share a base point")
    return -1 if a < b else 1


def map_arc(src: OrbitSource, g: HangingArc, seg_tol: float = 0.05, max_rounds: int = 40,
            max_tightenings: int = 6) -> HangingArc:
    """Image of ``g`` under a full map, subdivided until image steps are <= ``seg_tol``.

    A segment is also split when the image of its parameter midpoint lies more
    than ``seg_tol / 2`` from the chord midpoint, which catches short chords
    across a bulge.  New vertices are inserted at parameter midpoints, so the
    image keeps the parameterization of ``g``.  If the resolved polyline is not simple (chords
    of a strongly curved image can cross), ``seg_tol`` is halved and the
    refinement continues, up to ``max_tightenings`` times.
    """
    fm: FullMap = require_full(src, "map_arc")
    t = np.array(g.params)
    pre = np.array(g.vertices)
    ix, ir = fm.forward(pre[:, 0], pre[:, 1])
    img = np.column_stack([ix, ir])
    if abs(img[0, 1]) > 1e-12:
        raise PreconditionError("map does not preserve the boundary")
    img[0, 1] = 0.0
    tol = seg_tol
    for _ in range(max_tightenings + 1):
        for _ in range(max_rounds):
            step = np.hypot(*np.diff(img, axis=0).T)
            pm = 0.5 * (pre[:-1] + pre[1:])
            mx, mr = fm.forward(pm[:, 0], pm[:, 1])
            chord_mid = 0.5 * (img[:-1] + img[1:])
            sag = np.hypot(mx - chord_mid[:, 0], mr - chord_mid[:, 1])
            long = np.nonzero((step > tol) | (sag > 0.5 * tol))[0]
            if not long.size:
                break
            tm = 0.5 * (t[long] + t[long + 1])
            pm, mx, mr = pm[long], mx[long], mr[long]
            t = np.insert(t, long + 1, tm)
            pre = np.insert(pre, long + 1, pm, axis=0)
            img = np.insert(img, long + 1, np.column_stack([mx, mr]), axis=0)
        else:
            raise PreconditionError(f"image not resolved to seg_tol={tol} in {max_rounds} rounds")
        if kernels.first_crossing(img, img, same=True)[0] < 0:
            return HangingArc(img, t, check_simple=False)
        tol *= 0.5
    raise IntersectionError(f"image arc fails the simplicity check down to seg_tol={2 * tol}")


def write_arc(path: str | os.PathLike, g: HangingArc) -> None:
    lines = [ARC_HEADER]
    lines += [f"{t:.17g} {x:.17g} {r:.17g}" for t, (x, r) in zip(g.params, g.vertices)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_arc(path: str | os.PathLike, check_simple: bool = True) -> HangingArc:
    with open(path) as fh:
        rows = [ln.strip() for ln in fh if ln.strip()]
    if not rows or rows[0] != ARC_HEADER:
        raise PreconditionError(f"{path}: missing '{ARC_HEADER}' header")
    try:
        data = np.array([[float(v) for v in ln.split()] for ln in rows[1:]])
    except ValueError as exc:
        raise PreconditionError(f"{path}: malformed vertex line") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise PreconditionError(f"{path}: expected lines 't x1 r'")
    return HangingArc(data[:, 1:], data[:, 0], check_simple=check_simple)
