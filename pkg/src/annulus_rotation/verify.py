"""Acceptance checks, grouped into suites that the CLI and the test-suite share.

Each check returns a :class:`CheckResult` with the measured quantities, so a
failing run says by how much it failed.
"""
from __future__ import annotations

import functools
import inspect
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import arcgen
from .arcs import map_arc, relative_winding
from .cover import BACKWARD, FORWARD, FullMap, LiftPoint, check_deck_commutation, displacement_bound
from .gallery import (build_boomerang_example, build_horseshoe, build_periodic_strings,
                      build_transverse_example, proxy_prime_end_rotation, verify_invariance)
from .horseshoe import HorseshoeSystem, SymbolCode, rotation_bounds_from_code, verify_shift_bound
from .rotation import (DriftKind, classify_drift, drift_series, h1_check, iterate_orbit,
                       rotation_estimate, round_trip_error, subsampled_drift_gap, telescoping_error)

# frozen from the recurrence oracle (extremes near +-38 at 1e5 steps)
TRANSVERSE_DRIFT_THRESHOLD = 10.0
BOOMERANG_MONOTONE_SLACK = 0.5
BOOMERANG_HORIZON = 20_000
PERIODIC_PAIRS = ((0, 1), (1, 2), (1, 3), (2, 5))
HORSESHOE_WORDS = {"0": 0.0, "100": 1 / 3, "10": 0.5, "110": 2 / 3, "1": 1.0}
DOUBLING_BLOCKS = "blocks:0*4,1*16,0*64,..."


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'} [{self.criterion}] {self.name} ({self.seconds:.1f}s): {vals}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    return wrapper


# ---------------------------------------------------------------------------
# winding
# ---------------------------------------------------------------------------

@_timed
def check_winding_signs(seed: int = 0, count: int = 500, budget: float = 10.0) -> CheckResult:
    """Pairs passing under each other have winding -1 (g2 under g) or +1 (g under g2)."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    hits = {1: 0, 2: 0}
    for kind, want in ((1, -1), (2, 1)):
        for _ in range(count):
            g, g2 = arcgen.passing_pair(rng, kind)
            if relative_winding(g, g2).nearest_int == want:
                hits[kind] += 1
    dt = time.perf_counter() - t0
    ok = hits[1] == count and hits[2] == count and dt < budget
    return CheckResult(1, "winding signs", ok,
                       {"minus_one_rate": hits[1] / count, "plus_one_rate": hits[2] / count, "runtime_s": dt})


@_timed
def check_winding_homotopy(seed: int = 0, count: int = 200) -> CheckResult:
    """Nearest integer of w survives small homotopies; w itself when landings are fixed."""
    rng = np.random.default_rng(seed)
    kept = 0
    worst = 0.0
    for i in range(count):
        if i % 3 == 2:
            g, g2 = arcgen.hair_pair(rng, rng.uniform(0.3, 3.0))
        else:
            g, g2 = arcgen.passing_pair(rng, 1 + i % 3)
        w = relative_winding(g, g2)
        h, h2 = arcgen.perturb_pair(rng, g, g2)
        kept += relative_winding(h, h2).nearest_int == w.nearest_int
        h, h2 = arcgen.perturb_pair(rng, g, g2, fix_landing=True)
        worst = max(worst, abs(relative_winding(h, h2).w - w.w))
    ok = kept == count and worst <= 1e-6
    return CheckResult(2, "winding homotopy invariance", ok, {"preserved_rate": kept / count, "max_dw_fixed_landing": worst})


FAR_LANDING_FLOOR = -1.8  # keeps arcs out of the fast-twisting zone next to r = -2


def _far_pair(rng, sep_min):
    kind = rng.integers(0, 3)
    if kind == 0:
        return arcgen.hair_pair(rng, sep_min * (1.0 + rng.uniform(0.05, 1.0)))
    return arcgen.passing_pair(rng, 1 + int(kind == 2), floor=FAR_LANDING_FLOOR)


@_timed
def check_far_landing(seed: int = 0, count: int = 50) -> CheckResult:
    """Far-apart landing points keep the nearest integer of w after one step of the map."""
    rng = np.random.default_rng(seed)
    systems = [build_transverse_example(), build_periodic_strings(1, 3)]
    kept = total = 0
    for sysm in systems:
        src = sysm.source
        d_all = displacement_bound(src, (FAR_LANDING_FLOOR, 0.0), 256).value
        done = 0
        while done < count:
            g, g2 = _far_pair(rng, 2.0 * d_all)
            d = [displacement_bound(src, (float(a.vertices[:, 1].min()), 0.0), 128).value for a in (g, g2)]
            if abs(g.landing.x1 - g2.landing.x1) <= d[0] + d[1]:
                continue
            before = relative_winding(g, g2).nearest_int
            after = relative_winding(map_arc(src, g), map_arc(src, g2)).nearest_int
            kept += before == after
            done += 1
            total += 1
    return CheckResult(3, "far landing points keep [w]", kept == total, {"preserved_rate": kept / total, "pairs": total})


# ---------------------------------------------------------------------------
# horseshoe
# ---------------------------------------------------------------------------

@_timed
def check_shift_accounting(seed: int = 0, count: int = 100, n: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        code = SymbolCode.finite(rng.integers(0, 2, n + 40))
        worst = max(worst, verify_shift_bound(code, n).max_dev)
    return CheckResult(4, "horseshoe shift accounting", worst <= 1.0, {"max_dev": worst, "slack": 1.0 - worst})


@_timed
def check_prescribed_rotation(n: int = 3000, n_blocks: int = 10_000) -> CheckResult:
    errs = {}
    ok = True
    for word, dens in HORSESHOE_WORDS.items():
        sysm = build_horseshoe("periodic:" + word)
        est = rotation_estimate(iterate_orbit(sysm.source, "x", n)).estimate
        errs[f"err[{word}]"] = abs(est - dens)
        ok &= abs(est - dens) <= len(word) / n
    pr = rotation_bounds_from_code(SymbolCode.parse(DOUBLING_BLOCKS), n_blocks)
    gap = pr.limsup_proxy - pr.liminf_proxy
    errs["doubling_gap"] = gap
    return CheckResult(5, "prescribed rotation numbers", bool(ok and gap >= 0.2), errs)


# ---------------------------------------------------------------------------
# gallery
# ---------------------------------------------------------------------------

@_timed
def check_periodic_strings(n: int = 3000) -> CheckResult:
    worst_est = worst_proxy = 0.0
    for a, b in PERIODIC_PAIRS:
        sysm = build_periodic_strings(a, b)
        est = rotation_estimate(iterate_orbit(sysm.source, sysm.marked_points["p"], n)).estimate
        prox = proxy_prime_end_rotation(sysm, n)
        worst_est = max(worst_est, abs(est - a / b))
        worst_proxy = max(worst_proxy, abs(prox - a / b))
    tol = 4 * np.finfo(float).eps
    return CheckResult(6, "periodic strings rotate by a/b", worst_est <= tol and worst_proxy <= tol,
                       {"max_estimate_error": worst_est, "max_proxy_error": worst_proxy})


@_timed
def check_transverse(horizon: int = 100_000) -> CheckResult:
    sysm = build_transverse_example()
    fq = drift_series(iterate_orbit(sysm.source, sysm.marked_points["q"], horizon, FORWARD), 0.0).summary
    bp = drift_series(iterate_orbit(sysm.source, sysm.marked_points["p"], horizon, BACKWARD), 0.0).summary
    prox = proxy_prime_end_rotation(sysm, 1000)
    thr = TRANSVERSE_DRIFT_THRESHOLD
    ok = fq["max"] >= thr and fq["min"] <= -thr and bp["max"] >= thr and bp["min"] <= -thr and prox == 0.0
    return CheckResult(7, "transverse example drift", ok,
                       {"q_fwd_max": fq["max"], "q_fwd_min": fq["min"], "p_bwd_max": bp["max"],
                        "p_bwd_min": bp["min"], "proxy": prox})


@_timed
def check_boomerang(horizon: int = BOOMERANG_HORIZON) -> CheckResult:
    sysm = build_boomerang_example()
    m = {}
    ok = True
    for direction in (FORWARD, BACKWARD):
        series = iterate_orbit(sysm.source, "p", horizon, direction)
        v = drift_series(series, 0.0).values
        # min over n > m >= 1 of drift(n) - drift(m)
        dip = float(np.min(v[2:] - np.maximum.accumulate(v[1:-1])))
        rise = float(v[horizon] - v[100])
        est = rotation_estimate(series).estimate
        tag = "fwd" if direction == FORWARD else "bwd"
        m[f"{tag}_dip"], m[f"{tag}_rise"], m[f"{tag}_rotation"] = dip, rise, est
        ok &= dip >= -BOOMERANG_MONOTONE_SLACK and rise > 1.0 and abs(est) <= 1e-3
    h1 = h1_check(iterate_orbit(sysm.source, "p", horizon), 0.0, 0, 1)
    m["h1_limsup"], m["h1_linear"] = h1.holds_limsup, h1.holds_linear
    ok &= h1.holds_limsup and not h1.holds_linear
    return CheckResult(8, "boomerang example drift", bool(ok), m)


def _gallery_points():
    out = []
    for a, b in PERIODIC_PAIRS:
        s = build_periodic_strings(a, b)
        out.append((s, "p", s.marked_points["p"]))
    t = build_transverse_example()
    out += [(t, k, t.marked_points[k]) for k in ("q", "p")]
    bsys = build_boomerang_example()
    out.append((bsys, "p", "p"))
    return out


def drift_classes(horizon: int = 10_000):
    """Forward and backward drift classes of every marked point, per system."""
    table = {}
    for sysm, key, seed in _gallery_points():
        row = {}
        for direction in (FORWARD, BACKWARD):
            series = iterate_orbit(sysm.source, seed, horizon, direction)
            row[direction] = classify_drift(drift_series(series, sysm.rho_hat)).kind
        table.setdefault(sysm.name, {})[key] = row
    return table


def forbidden_pattern(points: dict) -> bool:
    """One point drifts only down backward while another drifts only up forward, or mirrored."""
    vals = list(points.values())
    for p in vals:
        for q in vals:
            if p[BACKWARD] is DriftKind.UNBOUNDED_BELOW and q[FORWARD] is DriftKind.UNBOUNDED_ABOVE:
                return True
            if p[BACKWARD] is DriftKind.UNBOUNDED_ABOVE and q[FORWARD] is DriftKind.UNBOUNDED_BELOW:
                return True
    return False


@_timed
def check_no_forbidden_pattern(horizon: int = 10_000) -> CheckResult:
    table = drift_classes(horizon)
    bad = [name for name, pts in table.items() if forbidden_pattern(pts)]
    m = {f"{name}:{k}": f"{row[FORWARD].value}/{row[BACKWARD].value}"
         for name, pts in table.items() for k, row in pts.items()}
    m["violations"] = len(bad)
    return CheckResult(9, "no forbidden transverse pattern", not bad, m)


@_timed
def check_subsampled_gap(horizon: int = 10_000) -> CheckResult:
    t = build_transverse_example()
    p = build_periodic_strings(1, 3)
    cases = [(t.source, t.marked_points["q"], 0.0), (t.source, t.marked_points["p"], 0.0),
             (p.source, p.marked_points["p"], 1 / 3)]
    worst = -math.inf
    ok = True
    runs = 0
    for src, seed, rho in cases:
        for b in (1, 2, 3, 5):
            for k in range(b):
                rep = subsampled_drift_gap(src, seed, b, k, rho, horizon, grid_density=256)
                ok &= rep.passed
                worst = max(worst, rep.max_gap / rep.bound if rep.bound > 0 else 0.0)
                runs += 1
    return CheckResult(10, "subsampled drift gap", bool(ok), {"cases": runs, "max_gap_over_bound": worst})


# ---------------------------------------------------------------------------
# infrastructure
# ---------------------------------------------------------------------------

@_timed
def check_infrastructure(seed: int = 0) -> CheckResult:
    t = build_transverse_example()
    periodic = [build_periodic_strings(a, b) for a, b in PERIODIC_PAIRS]
    full = [t] + periodic
    m = {}
    deck = max(check_deck_commutation(s.source, 10_000, seed=seed).max_error for s in full)
    n_tel, n_rt = 10_000, 1000
    tel = max(telescoping_error(s.source, pt, n_tel) for s in full for pt in s.marked_points.values())
    rt = max(round_trip_error(s.source, pt, n_rt) for s in full for pt in s.marked_points.values())
    systems = full + [build_boomerang_example(), build_horseshoe("periodic:10"),
                      build_horseshoe("periodic:110")]
    inv = min(verify_invariance(s, 1000, 1e-8, seed=seed).fraction for s in systems)
    m.update(deck_max=deck, telescoping_max=tel, telescoping_bound=n_tel * 1e-12,
             round_trip_max=rt, round_trip_bound=n_rt * 1e-10, invariance_min=inv)
    ok = deck <= 1e-9 and tel <= n_tel * 1e-12 and rt <= n_rt * 1e-10 and inv == 1.0
    return CheckResult(11, "infrastructure invariants", bool(ok), m)


SUITES = {
    "winding": (check_winding_signs, check_winding_homotopy, check_far_landing),
    "horseshoe": (check_shift_accounting, check_prescribed_rotation),
    "gallery": (check_periodic_strings, check_transverse, check_boomerang, check_no_forbidden_pattern),
    "drift": (check_subsampled_gap,),
    "infrastructure": (check_infrastructure,),
}


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    out = []
    for n in names:
        for fn in SUITES[n]:
            kwargs = {"seed": seed} if "seed" in inspect.signature(fn).parameters else {}
            out.append(fn(**kwargs))
    return out
