"""Hot loops, each in two flavours.

``*_jit`` functions are numba-compiled scalar loops; ``*_np`` functions are the
vectorized numpy equivalents.  The public name (no suffix) picks one according
to :data:`annulus_rotation._accel.USE_NUMBA`.  Both flavours must agree to
floating-point accuracy; ``tests/test_kernels.py`` checks that.
"""
import math

import numpy as np

from . import _accel
from ._accel import njit

TWO_PI = 2.0 * math.pi

# amplitude of the radial push in the transverse example; max of delta is AMP/2
TRANSVERSE_AMP = 0.2
# amplitude of the circle family in the boomerang example
BOOMERANG_AMP = 0.3


# ---------------------------------------------------------------------------
# transverse example: radial recurrence in model coordinates
# ---------------------------------------------------------------------------

@njit
def _transverse_radii_jit(rho0, cos_theta, n, forward):
    m = rho0.shape[0]
    out = np.empty((m, n + 1))
    for j in range(m):
        rho = rho0[j]
        c = cos_theta[j]
        out[j, 0] = rho
        for k in range(1, n + 1):
            if forward:
                rho = rho - TRANSVERSE_AMP * rho * rho / (1.0 + rho ** 4) * c
            else:
                lo = rho - TRANSVERSE_AMP
                hi = rho + TRANSVERSE_AMP
                while hi - lo > 1e-12:
                    mid = 0.5 * (lo + hi)
                    if mid - TRANSVERSE_AMP * mid * mid / (1.0 + mid ** 4) * c < rho:
                        lo = mid
                    else:
                        hi = mid
                rho = 0.5 * (lo + hi)
            out[j, k] = rho
    return out


def _transverse_radii_np(rho0, cos_theta, n, forward):
    rho = np.array(rho0, dtype=float)
    c = np.asarray(cos_theta, dtype=float)
    out = np.empty((rho.shape[0], n + 1))
    out[:, 0] = rho
    for k in range(1, n + 1):
        if forward:
            rho = rho - TRANSVERSE_AMP * rho * rho / (1.0 + rho ** 4) * c
        else:
            lo = rho - TRANSVERSE_AMP
            hi = rho + TRANSVERSE_AMP
            while np.max(hi - lo) > 1e-12:
                mid = 0.5 * (lo + hi)
                below = mid - TRANSVERSE_AMP * mid * mid / (1.0 + mid ** 4) * c < rho
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            rho = 0.5 * (lo + hi)
        out[:, k] = rho
    return out


def transverse_radii(rho0, cos_theta, n, forward=True):
    """Model radii of ``n`` steps of ``rho -> rho - delta(rho) cos(2 pi theta)``.

    Rows are independent orbits.  Backward steps invert the recurrence by
    bisection to width 1e-12.
    """
    rho0 = np.ascontiguousarray(rho0, dtype=float)
    cos_theta = np.ascontiguousarray(cos_theta, dtype=float)
    if _accel.USE_NUMBA:
        return _transverse_radii_jit(rho0, cos_theta, int(n), bool(forward))
    return _transverse_radii_np(rho0, cos_theta, int(n), bool(forward))


# ---------------------------------------------------------------------------
# boomerang example: n-th iterate of tau_r at the radius of step n
# ---------------------------------------------------------------------------

@njit
def _tau_inverse_jit(y, c):
    # tau(t) = t + c (1 - cos 2 pi t) / 2 is increasing (c pi < 1); root lies in [y - c, y]
    lo = y - c
    hi = y
    t = y - 0.5 * c * (1.0 - math.cos(TWO_PI * y))
    for _ in range(60):
        f = t + 0.5 * c * (1.0 - math.cos(TWO_PI * t)) - y
        if f > 0.0:
            hi = t
        else:
            lo = t
        step = f / (1.0 + c * math.pi * math.sin(TWO_PI * t))
        t_new = t - step
        if t_new <= lo or t_new >= hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) < 1e-15 or hi - lo < 1e-15:
            return t_new
        t = t_new
    return t


@njit
def _boomerang_thetas_jit(radii, steps, theta0):
    m = radii.shape[0]
    out = np.empty(m)
    for i in range(m):
        c = BOOMERANG_AMP / (1.0 + radii[i] * radii[i])
        t = theta0
        s = steps[i]
        if s >= 0:
            for _ in range(s):
                t = t + 0.5 * c * (1.0 - math.cos(TWO_PI * t))
        else:
            for _ in range(-s):
                t = _tau_inverse_jit(t, c)
        out[i] = t
    return out


def _tau_inverse_np(y, c):
    lo = y - c
    hi = y.copy()
    t = y - 0.5 * c * (1.0 - np.cos(TWO_PI * y))
    for _ in range(60):
        f = t + 0.5 * c * (1.0 - np.cos(TWO_PI * t)) - y
        pos = f > 0.0
        hi = np.where(pos, t, hi)
        lo = np.where(pos, lo, t)
        t_new = t - f / (1.0 + c * np.pi * np.sin(TWO_PI * t))
        bad = (t_new <= lo) | (t_new >= hi)
        t_new = np.where(bad, 0.5 * (lo + hi), t_new)
        done = np.all((np.abs(t_new - t) < 1e-15) | (hi - lo < 1e-15))
        t = t_new
        if done:
            break
    return t


def _boomerang_thetas_np(radii, steps, theta0):
    c = BOOMERANG_AMP / (1.0 + radii * radii)
    t = np.full(radii.shape[0], float(theta0))
    fwd = steps >= 0
    todo = np.abs(steps)
    for k in range(int(todo.max(initial=0))):
        active = todo > k
        f = active & fwd
        b = active & ~fwd
        if f.any():
            t[f] = t[f] + 0.5 * c[f] * (1.0 - np.cos(TWO_PI * t[f]))
        if b.any():
            t[b] = _tau_inverse_np(t[b], c[b])
    return t


@njit
def _boomerang_radii_jit(r0, n, forward):
    out = np.empty(n + 1)
    r = r0
    out[0] = r
    for k in range(n):
        if forward:
            if k != 0:
                r = r + r / (k * (r * r + 1.0))
        else:
            # solve r = g(x), g(x) = x + x / (m (x^2 + 1)), m = -(k + 1); g(x) - x <= 1/2
            m = -(k + 1.0)
            lo = r - 1.0
            hi = r
            while hi - lo > 1e-14 * max(1.0, abs(r)):
                mid = 0.5 * (lo + hi)
                if mid + mid / (m * (mid * mid + 1.0)) < r:
                    lo = mid
                else:
                    hi = mid
            r = 0.5 * (lo + hi)
        out[k + 1] = r
    return out


def _boomerang_radii_np(r0, n, forward):
    # inherently sequential; the scalar loop is the numpy-free reference
    out = np.empty(n + 1)
    r = float(r0)
    out[0] = r
    for k in range(n):
        if forward:
            if k != 0:
                r = r + r / (k * (r * r + 1.0))
        else:
            m = -(k + 1.0)
            lo, hi = r - 1.0, r
            while hi - lo > 1e-14 * max(1.0, abs(r)):
                mid = 0.5 * (lo + hi)
                if mid + mid / (m * (mid * mid + 1.0)) < r:
                    lo = mid
                else:
                    hi = mid
            r = 0.5 * (lo + hi)
        out[k + 1] = r
    return out


def boomerang_radii(r0, n, forward=True):
    """Radial levels ``r_0, r_{+-1}, ..., r_{+-n}`` of the boomerang strings.

    Forward: ``r_{k+1} = r_k + r_k / (k (r_k^2 + 1))`` (identity for k = 0).
    Backward: ``r_{-k-1}`` is the root of the same update with index ``-(k+1)``,
    found by bisection on ``[r - 1, r]``.
    """
    if _accel.USE_NUMBA:
        return _boomerang_radii_jit(float(r0), int(n), bool(forward))
    return _boomerang_radii_np(r0, int(n), bool(forward))


def boomerang_thetas(radii, steps, theta0=0.5):
    """``tau_{r_i}^{steps_i}(theta0)`` for each i, on the real line.

    ``tau_r(t) = t + c(r) (1 - cos 2 pi t) / 2`` with ``c(r) = 0.3 / (1 + r^2)``.
    Negative step counts use the inverse (safeguarded Newton inside the
    bracket ``[y - c, y]``).  Cost is O(sum |steps|).
    """
    radii = np.ascontiguousarray(radii, dtype=float)
    steps = np.ascontiguousarray(steps, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _boomerang_thetas_jit(radii, steps, float(theta0))
    return _boomerang_thetas_np(radii, steps, float(theta0))


# ---------------------------------------------------------------------------
# relative winding: unwrap the direction of a piecewise-linear difference curve
# ---------------------------------------------------------------------------

@njit
def _wrap_half_turns(a):
    # representative of a in (-1, 1]
    a = a - 2.0 * math.floor((a + 1.0) / 2.0)
    if a <= -1.0:
        a += 2.0
    return a


@njit
def _unwrap_winding_jit(dx, dy, tol, max_depth):
    """Returns (w, deepest bisection level, status); status 1 = coincident point."""
    n = dx.shape[0]
    for i in range(n):
        if math.hypot(dx[i], dy[i]) <= tol:
            return 0.0, 0, 1
    total = 0.0
    deepest = 0
    # explicit stack of (s0, s1, angle0, angle1, depth) inside one interval
    stack_s0 = np.empty(max_depth + 2)
    stack_s1 = np.empty(max_depth + 2)
    stack_a0 = np.empty(max_depth + 2)
    stack_a1 = np.empty(max_depth + 2)
    stack_d = np.empty(max_depth + 2, dtype=np.int64)
    for i in range(n - 1):
        a0 = math.atan2(dy[i], dx[i]) / math.pi
        a1 = math.atan2(dy[i + 1], dx[i + 1]) / math.pi
        step = _wrap_half_turns(a1 - a0)
        if abs(step) < 0.5:
            total += step
            continue
        top = 0
        stack_s0[0] = 0.0
        stack_s1[0] = 1.0
        stack_a0[0] = a0
        stack_a1[0] = a1
        stack_d[0] = 0
        top = 1
        while top > 0:
            top -= 1
            s0 = stack_s0[top]
            s1 = stack_s1[top]
            b0 = stack_a0[top]
            b1 = stack_a1[top]
            d = stack_d[top]
            st = _wrap_half_turns(b1 - b0)
            if abs(st) < 0.25 or d >= max_depth:
                total += st
                if d > deepest:
                    deepest = d
                continue
            sm = 0.5 * (s0 + s1)
            mx = (1.0 - sm) * dx[i] + sm * dx[i + 1]
            my = (1.0 - sm) * dy[i] + sm * dy[i + 1]
            if math.hypot(mx, my) <= tol:
                return 0.0, d + 1, 1
            bm = math.atan2(my, mx) / math.pi
            # push right half first so the left half is summed first
            stack_s0[top] = sm
            stack_s1[top] = s1
            stack_a0[top] = bm
            stack_a1[top] = b1
            stack_d[top] = d + 1
            top += 1
            stack_s0[top] = s0
            stack_s1[top] = sm
            stack_a0[top] = b0
            stack_a1[top] = bm
            stack_d[top] = d + 1
            top += 1
    return total, deepest, 0


def _wrap_half_turns_np(a):
    a = a - 2.0 * np.floor((a + 1.0) / 2.0)
    return np.where(a <= -1.0, a + 2.0, a)


def _unwrap_winding_np(dx, dy, tol, max_depth):
    if np.any(np.hypot(dx, dy) <= tol):
        return 0.0, 0, 1
    ang = np.arctan2(dy, dx) / np.pi
    steps = _wrap_half_turns_np(np.diff(ang))
    flagged = np.abs(steps) >= 0.5
    total = float(np.sum(steps[~flagged]))
    deepest = 0
    idx = np.nonzero(flagged)[0]
    s0 = np.zeros(idx.size)
    s1 = np.ones(idx.size)
    b0 = ang[idx]
    b1 = ang[idx + 1]
    depth = 0
    while idx.size:
        st = _wrap_half_turns_np(b1 - b0)
        final = (np.abs(st) < 0.25) | (depth >= max_depth)
        if final.any():
            total += float(np.sum(st[final]))
            deepest = max(deepest, depth)
        keep = ~final
        idx, s0, s1, b0, b1 = idx[keep], s0[keep], s1[keep], b0[keep], b1[keep]
        if not idx.size:
            break
        sm = 0.5 * (s0 + s1)
        mx = (1.0 - sm) * dx[idx] + sm * dx[idx + 1]
        my = (1.0 - sm) * dy[idx] + sm * dy[idx + 1]
        if np.any(np.hypot(mx, my) <= tol):
            return 0.0, depth + 1, 1
        bm = np.arctan2(my, mx) / np.pi
        idx = np.concatenate([idx, idx])
        s0, s1 = np.concatenate([s0, sm]), np.concatenate([sm, s1])
        b0, b1 = np.concatenate([b0, bm]), np.concatenate([bm, b1])
        depth += 1
    return total, deepest, 0


def unwrap_winding(dx, dy, tol=1e-12, max_depth=32):
    """Total lifted angle, in half-turns, swept by the polyline (dx_i, dy_i).

    Between samples the curve is the straight segment, so any interval whose
    principal step is at least 0.5 half-turns is bisected until every
    sub-step is below 0.25 or ``max_depth`` is reached.
    """
    dx = np.ascontiguousarray(dx, dtype=float)
    dy = np.ascontiguousarray(dy, dtype=float)
    if _accel.USE_NUMBA:
        w, depth, status = _unwrap_winding_jit(dx, dy, float(tol), int(max_depth))
    else:
        w, depth, status = _unwrap_winding_np(dx, dy, float(tol), int(max_depth))
    return float(w), int(depth), int(status)


# ---------------------------------------------------------------------------
# segment intersection between polylines
# ---------------------------------------------------------------------------

@njit
def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0


@njit
def _on_segment(ax, ay, bx, by, cx, cy):
    return min(ax, bx) <= cx <= max(ax, bx) and min(ay, by) <= cy <= max(ay, by)


@njit
def _segments_meet(ax, ay, bx, by, cx, cy, dx, dy):
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    return False


@njit
def _first_crossing_jit(p, q, same, skip_i, skip_j):
    n = p.shape[0] - 1
    m = q.shape[0] - 1
    for i in range(n):
        pminx = min(p[i, 0], p[i + 1, 0])
        pmaxx = max(p[i, 0], p[i + 1, 0])
        pminy = min(p[i, 1], p[i + 1, 1])
        pmaxy = max(p[i, 1], p[i + 1, 1])
        j0 = i + 2 if same else 0
        for j in range(j0, m):
            if i == skip_i and j == skip_j:
                continue
            if max(q[j, 0], q[j + 1, 0]) < pminx or min(q[j, 0], q[j + 1, 0]) > pmaxx:
                continue
            if max(q[j, 1], q[j + 1, 1]) < pminy or min(q[j, 1], q[j + 1, 1]) > pmaxy:
                continue
            if _segments_meet(p[i, 0], p[i, 1], p[i + 1, 0], p[i + 1, 1],
                              q[j, 0], q[j, 1], q[j + 1, 0], q[j + 1, 1]):
                return i, j
    return -1, -1


def _orient_np(ax, ay, bx, by, cx, cy):
    return np.sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _on_segment_np(ax, ay, bx, by, cx, cy):
    return ((np.minimum(ax, bx) <= cx) & (cx <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= cy) & (cy <= np.maximum(ay, by)))


def _first_crossing_np(p, q, same, skip_i, skip_j):
    n = p.shape[0] - 1
    cx, cy = q[:-1, 0], q[:-1, 1]
    dx, dy = q[1:, 0], q[1:, 1]
    jj = np.arange(q.shape[0] - 1)
    for i in range(n):
        ax, ay, bx, by = p[i, 0], p[i, 1], p[i + 1, 0], p[i + 1, 1]
        o1 = _orient_np(ax, ay, bx, by, cx, cy)
        o2 = _orient_np(ax, ay, bx, by, dx, dy)
        o3 = _orient_np(cx, cy, dx, dy, ax, ay)
        o4 = _orient_np(cx, cy, dx, dy, bx, by)
        hit = (o1 != o2) & (o3 != o4)
        hit |= (o1 == 0) & _on_segment_np(ax, ay, bx, by, cx, cy)
        hit |= (o2 == 0) & _on_segment_np(ax, ay, bx, by, dx, dy)
        hit |= (o3 == 0) & _on_segment_np(cx, cy, dx, dy, ax, ay)
        hit |= (o4 == 0) & _on_segment_np(cx, cy, dx, dy, bx, by)
        if same:
            hit &= jj >= i + 2
        if i == skip_i and 0 <= skip_j < hit.size:
            hit[skip_j] = False
        found = np.nonzero(hit)[0]
        if found.size:
            return i, int(found[0])
    return -1, -1


def first_crossing(p, q, same=False, skip=(-1, -1)):
    """First pair (i, j) such that segment i of ``p`` meets segment j of ``q``.

    With ``same=True`` the polylines are the same and neighbouring segments
    (which share a vertex) are not compared.  ``skip`` removes one pair from
    consideration.  Returns ``(-1, -1)`` when nothing meets.
    """
    p = np.ascontiguousarray(p, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    if _accel.USE_NUMBA:
        i, j = _first_crossing_jit(p, q, bool(same), int(skip[0]), int(skip[1]))
    else:
        i, j = _first_crossing_np(p, q, bool(same), int(skip[0]), int(skip[1]))
    return int(i), int(j)


# ---------------------------------------------------------------------------
# horseshoe: fractional coordinates of a coded orbit
# ---------------------------------------------------------------------------

@njit
def _coded_fractions_jit(symbols, tail):
    d = symbols.shape[0]
    y = np.empty(d + 1)
    y[d] = tail
    for k in range(d - 1, -1, -1):
        y[k] = 0.2 * y[k + 1] + 0.6 * symbols[k]
    return y


def _coded_fractions_np(symbols, tail):
    d = symbols.shape[0]
    a = symbols.astype(float)
    y = np.zeros(d + 1)
    # terms beyond 0.2**25 are below double resolution of values in [0, 1]
    for m in range(min(d, 26)):
        y[:d - m] += 0.6 * 0.2 ** m * a[m:]
    k = np.arange(d + 1)
    y += tail * 0.2 ** (d - k).astype(float)
    return y


def coded_fractions(symbols, tail=0.5):
    """Positions y_k in [0, 1] of the orbit coded by ``symbols``.

    Solves ``y_k = g_{a_k}(y_{k+1})`` backwards from ``y_d = tail`` where
    ``g_0(y) = y/5`` and ``g_1(y) = y/5 + 3/5``; the returned array has
    length ``len(symbols) + 1``.
    """
    symbols = np.ascontiguousarray(symbols, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _coded_fractions_jit(symbols, float(tail))
    return _coded_fractions_np(symbols, float(tail))
