"""Orbits, rotation and drift estimates, and finite-horizon drift diagnostics.

All limit statements are replaced by finite-horizon proxies.  Drift growth is
judged on dyadic windows ``2**k <= |n| < 2**(k+1)``; anything that does not
fit a clear pattern is reported as ``Inconclusive`` rather than guessed.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .cover import (BACKWARD, FORWARD, FullMap, LiftPoint, OrbitSource, StringSystem,
                    check_direction, displacement_bound, displacement_field, require_full)
from .errors import NumericalError, PreconditionError, RegionError, UnsupportedSourceError


@dataclass(frozen=True)
class OrbitSeries:
    """``x1[i], r[i]`` is ``F^{n_values[i]}(seed)``.

    ``cumulative[i]`` is ``x1[i] - x1[0]`` computed from a deck-normalized
    copy of the seed, so it does not depend on which lift of the seed was
    passed in.
    """

    direction: str
    n_values: np.ndarray
    x1: np.ndarray
    r: np.ndarray
    seed: LiftPoint
    cumulative: np.ndarray
    min_r: float
    compact_cutoff: float
    source_name: str = ""

    @property
    def below_cutoff(self) -> bool:
        return self.min_r < self.compact_cutoff

    @property
    def points(self) -> list[LiftPoint]:
        return [LiftPoint(float(x), float(r)) for x, r in zip(self.x1, self.r)]

    def __len__(self):
        return self.n_values.size


def iterate_orbit(src: OrbitSource, seed, n_max: int, direction: str = FORWARD) -> OrbitSeries:
    """Forward or backward orbit of ``seed`` with ``n_max`` steps.

    Full maps take a :class:`LiftPoint`; string systems take the name of one
    of their seeds (or the seed point itself).  The orbit is flagged through
    :attr:`OrbitSeries.below_cutoff` when it drops below the source's
    compactness cutoff.
    """
    check_direction(direction)
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    if isinstance(src, StringSystem):
        name = src.resolve_seed(seed)
        if direction == BACKWARD and not src.backward_available:
            raise UnsupportedSourceError(f"{src.name}: no backward rule")
        x1, r = src.orbit(name, n_max, direction)
        seed_pt = src.seeds[name]
        cumulative = x1 - x1[0]
    else:
        fm = require_full(src, "iterate_orbit")
        if direction == BACKWARD and not fm.invertible:
            raise UnsupportedSourceError(f"{fm.name}: backward evaluation unavailable")
        seed_pt = seed if isinstance(seed, LiftPoint) else LiftPoint(*seed)
        k = math.floor(seed_pt.x1)
        base = LiftPoint(seed_pt.x1 - k, seed_pt.r)
        rel, r = fm.orbit(base, n_max, direction)
        cumulative = rel - rel[0]
        x1 = rel + k
        x1[0] = seed_pt.x1
    x1 = np.asarray(x1, dtype=float)
    r = np.asarray(r, dtype=float)
    if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(r))):
        raise NumericalError(f"{src.name}: orbit overflowed")
    sign = 1 if direction == FORWARD else -1
    return OrbitSeries(direction=direction, n_values=sign * np.arange(n_max + 1), x1=x1, r=r,
                       seed=seed_pt, cumulative=np.asarray(cumulative, dtype=float),
                       min_r=float(r.min()), compact_cutoff=float(src.compact_cutoff),
                       source_name=src.name)


@dataclass(frozen=True)
class RotationEstimate:
    estimate: float
    tail_slope: float
    residual: float


def rotation_estimate(series: OrbitSeries) -> RotationEstimate:
    """Endpoint ratio, least-squares slope over the last half, and their gap."""
    if len(series) < 16:
        raise PreconditionError("need at least 16 orbit points")
    n = series.n_values
    est = float(series.cumulative[-1] / n[-1])
    h = len(series) // 2
    slope = float(np.polyfit(n[h:].astype(float), series.cumulative[h:], 1)[0])
    return RotationEstimate(est, slope, abs(est - slope))


@dataclass(frozen=True)
class DriftSeries:
    rho: float
    n_values: np.ndarray
    values: np.ndarray
    summary: dict = field(default_factory=dict)


def dyadic_windows(n_abs_max: int) -> list[tuple[int, int]]:
    out = []
    k = 0
    while 2 ** k <= n_abs_max:
        out.append((2 ** k, min(2 ** (k + 1), n_abs_max + 1)))
        k += 1
    return out


def drift_series(series: OrbitSeries, rho: float) -> DriftSeries:
    """``(F^n p)_1 - (p)_1 - n rho`` along the series."""
    n = series.n_values
    values = series.cumulative - n * float(rho)
    absn = np.abs(n)
    wins = dyadic_windows(int(absn.max()))
    wmax = [float(values[(absn >= lo) & (absn < hi)].max()) for lo, hi in wins]
    wmin = [float(values[(absn >= lo) & (absn < hi)].min()) for lo, hi in wins]
    summary = {
        "max": float(values.max()),
        "min": float(values.min()),
        "argmax": int(n[int(values.argmax())]),
        "argmin": int(n[int(values.argmin())]),
        "windows": wins,
        "window_maxima": wmax,
        "window_minima": wmin,
    }
    return DriftSeries(rho=float(rho), n_values=n, values=values, summary=summary)


class DriftKind(enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED_ABOVE = "UnboundedAbove"
    UNBOUNDED_BELOW = "UnboundedBelow"
    OSCILLATING = "Oscillating"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DriftClass:
    kind: DriftKind
    bound: float | None
    evidence: dict

    @property
    def name(self) -> str:
        if self.kind is DriftKind.BOUNDED:
            return f"Bounded({self.bound:.6g})"
        return self.kind.value

    def __str__(self):
        return self.name


def classify_drift(d: DriftSeries, atol: float = 1e-9, rtol: float = 1e-3) -> DriftClass:
    """Finite-horizon classification of a drift series.

    * growth above: the last four dyadic window maxima increase strictly and
      the final one exceeds three times the first window's maximum (and
      ``atol``); growth below is the mirror image;
    * both: ``Oscillating``;
    * neither, and the last two windows do not exceed the earlier sup of
      ``|drift|`` by more than ``rtol`` relative plus ``atol``: ``Bounded(C)``
      with C the full-horizon max of ``|drift|``.  The relative slack is there
      because a bounded quasi-periodic drift keeps creeping toward its sup;
    * otherwise ``Inconclusive``.
    """
    absn = np.abs(d.n_values)
    if absn.max() < 2 ** 8:
        raise PreconditionError("classification needs a horizon of at least 2**8")
    wmax = np.array(d.summary["window_maxima"])
    wmin = np.array(d.summary["window_minima"])
    up = bool(np.all(np.diff(wmax[-4:]) > 0) and wmax[-1] > 3.0 * wmax[0] and wmax[-1] > atol)
    down = bool(np.all(np.diff(wmin[-4:]) < 0) and wmin[-1] < 3.0 * wmin[0] and wmin[-1] < -atol)
    evidence = {"window_maxima": wmax.tolist(), "window_minima": wmin.tolist(), "up": up, "down": down}
    if up and down:
        return DriftClass(DriftKind.OSCILLATING, None, evidence)
    if up:
        return DriftClass(DriftKind.UNBOUNDED_ABOVE, None, evidence)
    if down:
        return DriftClass(DriftKind.UNBOUNDED_BELOW, None, evidence)
    lo2 = d.summary["windows"][-2][0]
    late = np.abs(d.values[absn >= lo2])
    early = np.abs(d.values[absn < lo2])
    c = float(np.abs(d.values).max())
    if late.max() <= early.max() * (1.0 + rtol) + atol:
        return DriftClass(DriftKind.BOUNDED, c, evidence)
    return DriftClass(DriftKind.INCONCLUSIVE, None, evidence)


@dataclass(frozen=True)
class GapReport:
    max_gap: float
    bound: float
    passed: bool
    d_sup: float


def subsampled_drift_gap(src: OrbitSource, seed, b: int, k: int, rho: float, n_max: int,
                         grid_density: int = 512, region: tuple[float, float] | None = None) -> GapReport:
    """Largest ``|drift(bn+k) - drift(m)|`` for ``m in [bn+k, b(n+1)+k)``.

    Compared against ``b * D_sup + (b + |k|) |rho|`` where ``D_sup`` is the
    displacement bound over the radial range of the orbit (or ``region``).
    """
    fm = require_full(src, "subsampled_drift_gap")
    if b < 1:
        raise PreconditionError("b must be >= 1")
    series = iterate_orbit(fm, seed, n_max)
    lo, hi = float(series.r.min()), float(series.r.max())
    if region is None:
        region = (lo, hi)
    elif lo < region[0] or hi > region[1]:
        raise RegionError(f"orbit radial range [{lo}, {hi}] leaves region {region}")
    d_sup = displacement_bound(fm, region, grid_density).value
    drift = series.cumulative - series.n_values * float(rho)
    starts = np.arange(0, n_max + 1) * b + k
    starts = starts[(starts >= 0) & (starts + b - 1 <= n_max)]
    gap = 0.0
    for j in range(1, b):
        gap = max(gap, float(np.max(np.abs(drift[starts] - drift[starts + j]), initial=0.0)))
    bound = b * d_sup + (b + abs(k)) * abs(rho)
    return GapReport(max_gap=gap, bound=bound, passed=gap <= bound, d_sup=d_sup)


@dataclass(frozen=True)
class H1Result:
    holds_limsup: bool
    holds_linear: bool
    drift_class: DriftClass
    tail_slope: float
    residual: float


def h1_check(series: OrbitSeries, rho: float, a: int, b: int, slope_floor: float = 1e-9) -> H1Result:
    """Finite-horizon test that the orbit outruns rotation by ``a/b >= rho``.

    ``holds_limsup``: the drift against ``a/b`` grows without bound above
    (``UnboundedAbove`` or ``Oscillating``).  ``holds_linear``: the tail slope
    exceeds ``rho`` by more than ``max(3 * residual, slope_floor)``.
    """
    if b < 1:
        raise PreconditionError("b must be >= 1")
    if rho > a / b + 1e-15:
        raise PreconditionError(f"need rho <= a/b, got rho={rho}, a/b={a / b}")
    cls = classify_drift(drift_series(series, a / b))
    est = rotation_estimate(series)
    limsup = cls.kind in (DriftKind.UNBOUNDED_ABOVE, DriftKind.OSCILLATING)
    linear = (est.tail_slope - rho) > max(3.0 * est.residual, slope_floor)
    return H1Result(limsup, bool(linear), cls, est.tail_slope, est.residual)


@dataclass(frozen=True)
class H2Witness:
    q0: LiftPoint
    indices: list
    deck_counts: list
    cluster_diameter: float
    image_distance: float


def h2_witness_search(src: OrbitSource, seed, a: int, b: int, k: int, horizon: int,
                      eps: float = 1e-2, delta: float = 1e-1, min_members: int = 2) -> H2Witness | None:
    """Look for a cluster of ``T^{-m_i - a n_i} F^{b n_i + k}(seed)`` not fixed by ``T^{-a} F^b``.

    Normalized points are binned on an ``eps`` grid.  A cell qualifies when it
    holds ``min_members`` points whose deck counts ``m_i`` strictly increase
    with ``n_i``; its mean is ``q0``.  For full maps ``T^{-a} F^b(q0)`` is
    evaluated directly, for string systems it is the mean of the members'
    orbit successors.  Returns the most populated qualifying cluster whose
    image lies farther than ``delta`` from ``q0``, or None.
    """
    if b < 1 or not 0 <= k:
        raise PreconditionError("need b >= 1 and k >= 0")
    series = iterate_orbit(src, seed, horizon)
    n_idx = np.arange(0, (horizon - k) // b + 1)
    orb = b * n_idx + k
    x = series.x1[orb] - a * n_idx
    m = np.floor(x)
    fx = x - m
    r = series.r[orb]
    cells: dict[tuple[int, int], list[int]] = {}
    r0 = float(r.min())
    for i, key in enumerate(zip((fx // eps).astype(np.int64).tolist(), ((r - r0) // eps).astype(np.int64).tolist())):
        cells.setdefault(key, []).append(i)
    best = None
    for members in cells.values():
        if len(members) < min_members:
            continue
        kept = [members[0]]
        for i in members[1:]:
            if m[i] > m[kept[-1]]:
                kept.append(i)
        if len(kept) < min_members:
            continue
        kept = np.array(kept)
        q0x, q0r = float(fx[kept].mean()), float(r[kept].mean())
        if isinstance(src, FullMap):
            ix, ir = q0x, q0r
            for _ in range(b):
                ix, ir = src.forward(ix, ir)
            ix, ir = float(ix) - a, float(ir)
        else:
            kept = kept[orb[kept] + b <= horizon]
            if kept.size < min_members:
                continue
            succ_x = series.x1[orb[kept] + b] - a * (n_idx[kept] + 1) - m[kept]
            ix, ir = float(succ_x.mean()), float(series.r[orb[kept] + b].mean())
        dist = math.hypot(ix - q0x, ir - q0r)
        if dist <= delta:
            continue
        pts = np.column_stack([fx[kept], r[kept]])
        diam = float(np.max(np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))))
        cand = H2Witness(LiftPoint(q0x, q0r), n_idx[kept].tolist(), m[kept].astype(int).tolist(), diam, dist)
        if best is None or len(cand.indices) > len(best.indices):
            best = cand
    return best


def empirical_measure_rotation(src: OrbitSource, seed, n: int, rtol_per_step: float = 1e-12) -> float:
    """Birkhoff average of the displacement u along the first n orbit points.

    For full maps u is evaluated pointwise and the sum is checked against the
    telescoped endpoint difference to ``n * rtol_per_step``; string systems
    only know u along the orbit, where the identity is exact.
    """
    series = iterate_orbit(src, seed, n)
    if isinstance(src, FullMap):
        u = displacement_field(src, series.x1[:-1], series.r[:-1])
        total = float(np.sum(u))
        err = abs(total - float(series.cumulative[-1]))
        if err > n * rtol_per_step:
            raise NumericalError(f"telescoping identity off by {err:.3g} over {n} steps")
        return total / n
    return float(np.sum(np.diff(series.cumulative))) / n


def telescoping_error(src: FullMap, seed: LiftPoint, n: int) -> float:
    """``|sum_k u(F^k p) - ((F^n p)_1 - p_1)|``."""
    series = iterate_orbit(src, seed, n)
    u = displacement_field(src, series.x1[:-1], series.r[:-1])
    return abs(float(np.sum(u)) - float(series.cumulative[-1]))


def round_trip_error(src: FullMap, seed: LiftPoint, n: int) -> float:
    """Distance from ``seed`` to ``F^{-n} F^n(seed)``, both legs by single-step evaluation."""
    fm = require_full(src, "round_trip_error")
    x, r = seed.x1, seed.r
    for _ in range(n):
        x, r = fm.forward(x, r)
    for _ in range(n):
        x, r = fm.backward(x, r)
    return math.hypot(float(x) - seed.x1, float(r) - seed.r)


def summary_dict(series: OrbitSeries, rho: float) -> dict:
    d = drift_series(series, rho)
    est = rotation_estimate(series)
    try:
        cls = classify_drift(d).name
    except PreconditionError:
        cls = "Inconclusive"
    return {
        "rotation_estimate": est.estimate,
        "tail_slope": est.tail_slope,
        "residual": est.residual,
        "drift_max": d.summary["max"],
        "drift_min": d.summary["min"],
        "min_r": series.min_r,
        "classification": cls,
    }


def write_series_csv(path: str | os.PathLike, series: OrbitSeries, rho: float) -> None:
    d = drift_series(series, rho)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "x1", "r", "drift"])
        for n, x, r, v in zip(series.n_values.tolist(), series.x1.tolist(), series.r.tolist(), d.values.tolist()):
            w.writerow([n, repr(x), repr(r), repr(v)])


def write_summary_json(path: str | os.PathLike, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
