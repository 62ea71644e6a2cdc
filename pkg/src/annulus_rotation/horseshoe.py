"""Piecewise-affine rotational horseshoe on the square D = [0, 1] x [-2, -1].

Two vertical strips S0 = [0, 1/5] and S1 = [3/5, 4/5] are stretched by 5 and
squashed by 1/5.  Branch 0 maps S0 onto [0, 1] (no deck shift); branch 1 maps
S1 onto [1, 2], i.e. onto the deck translate of D.  Both branches preserve
orientation.  A point coded by ``a`` therefore has lifted coordinate
``s_k + y_k`` after k steps, with ``s_k = a_0 + ... + a_{k-1}`` and ``y_k`` in
[0, 1].
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .cover import BACKWARD, FORWARD, LiftPoint, StringSystem, check_direction
from .errors import NumericalError, PreconditionError, UnsupportedSourceError

STRIPS = ((0.0, 0.2), (0.6, 0.8))
BANDS = (-2.0, -1.2)  # lower edge of the image band of each branch
SQUARE = (-2.0, -1.0)
MID_HEIGHT = -1.5


class SymbolCode:
    """A one-sided binary sequence.

    Build with :meth:`finite`, :meth:`periodic`, :meth:`blocks` or
    :meth:`parse`.  ``code[i]`` is the i-th symbol and ``code.symbols(n)`` the
    first n as an int array.
    """

    def __init__(self, kind, data, extend=False, label=None):
        self.kind = kind
        self._data = data
        self._extend = extend
        self.label = label or kind

    def __repr__(self):
        return f"SymbolCode({self.label})"

    @classmethod
    def finite(cls, symbols):
        a = np.asarray(symbols, dtype=np.int64)
        if a.ndim != 1 or np.any((a != 0) & (a != 1)):
            raise PreconditionError("symbols must be 0 or 1")
        return cls("list", a, label="list:" + "".join(map(str, a[:32])) + ("..." if a.size > 32 else ""))

    @classmethod
    def periodic(cls, word):
        a = np.array([int(c) for c in str(word)] if isinstance(word, str) else list(word), dtype=np.int64)
        if a.size == 0 or np.any((a != 0) & (a != 1)):
            raise PreconditionError(f"bad periodic word {word!r}")
        return cls("periodic", a, label="periodic:" + "".join(map(str, a)))

    @classmethod
    def blocks(cls, schedule, extend=False):
        """Concatenated constant blocks ``[(symbol, length), ...]``.

        With ``extend=True`` the schedule continues forever: symbols keep
        alternating with period two and lengths keep the ratio of the last
        two blocks.
        """
        sched = [(int(s), int(n)) for s, n in schedule]
        if not sched or any(s not in (0, 1) or n < 1 for s, n in sched):
            raise PreconditionError(f"bad block schedule {schedule!r}")
        if extend and len(sched) < 2:
            raise PreconditionError("an extended schedule needs at least two blocks")
        body = ",".join(f"{s}*{n}" for s, n in sched)
        return cls("blocks", sched, extend=extend, label="blocks:" + body + (",..." if extend else ""))

    @classmethod
    def parse(cls, text: str) -> "SymbolCode":
        """Parse ``periodic:100``, ``blocks:0*4,1*16,0*64,...`` or ``list:0110``."""
        kind, _, body = text.strip().partition(":")
        if kind == "periodic":
            return cls.periodic(body)
        if kind == "list":
            if not re.fullmatch(r"[01]+", body):
                raise PreconditionError(f"bad list code {text!r}")
            return cls.finite([int(c) for c in body])
        if kind == "blocks":
            parts = [p.strip() for p in body.split(",") if p.strip()]
            extend = bool(parts) and parts[-1] in ("...", "…")
            if extend:
                parts = parts[:-1]
            sched = []
            for p in parts:
                m = re.fullmatch(r"([01])\*(\d+)", p)
                if not m:
                    raise PreconditionError(f"bad block {p!r} in {text!r}")
                sched.append((int(m.group(1)), int(m.group(2))))
            return cls.blocks(sched, extend=extend)
        raise PreconditionError(f"unknown code kind in {text!r}")

    @property
    def length(self):
        """Number of available symbols (``math.inf`` for infinite codes)."""
        if self.kind == "list":
            return self._data.size
        if self.kind == "blocks" and not self._extend:
            return sum(n for _, n in self._data)
        return math.inf

    def _block_lengths(self, n):
        sched = list(self._data)
        total = sum(k for _, k in sched)
        while total < n and self._extend:
            (s0, n0), (_, n1) = sched[-2], sched[-1]
            nxt = max(1, int(round(n1 * n1 / n0)))
            sched.append((s0, nxt))
            total += nxt
        return sched

    def symbols(self, n: int) -> np.ndarray:
        if n > self.length:
            raise PreconditionError(f"{self.label} has only {self.length} symbols, {n} requested")
        if self.kind == "list":
            return self._data[:n].copy()
        if self.kind == "periodic":
            return np.resize(self._data, n)
        out = np.concatenate([np.full(k, s, dtype=np.int64) for s, k in self._block_lengths(n)])
        return out[:n]

    def __getitem__(self, i):
        return int(self.symbols(i + 1)[i])

    def partial_sums(self, n: int) -> np.ndarray:
        """``s_k`` for k = 0..n."""
        return np.concatenate([[0], np.cumsum(self.symbols(n))])

    def shifted(self, k: int = 1) -> "SymbolCode":
        if self.kind == "periodic":
            return SymbolCode.periodic(np.roll(self._data, -k))
        if self.kind == "list":
            return SymbolCode.finite(self._data[k:])
        # infinite block codes: materialize enough symbols for practical depths
        return SymbolCode.finite(self.symbols(k + 4096)[k:])


def code_to_point(code: SymbolCode, depth: int) -> LiftPoint:
    """Point of the vertical line coded by ``code``, at mid-height.

    Applies the inverse branches ``g_{a_0} o ... o g_{a_{depth-1}}`` to 0.5;
    the error to the true line is at most ``5**-depth``.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    y = kernels.coded_fractions(code.symbols(depth), 0.5)
    return LiftPoint(float(y[0]), MID_HEIGHT)


def horseshoe_step(p: LiftPoint, symbol: int) -> LiftPoint:
    """Apply branch ``symbol`` of the horseshoe to a point of the lifted square."""
    if symbol not in (0, 1):
        raise PreconditionError("symbol must be 0 or 1")
    base = math.floor(p.x1)
    frac = p.x1 - base
    lo, hi = STRIPS[symbol]
    if not (lo <= frac <= hi) or not (SQUARE[0] <= p.r <= SQUARE[1]):
        raise PreconditionError(f"{p} is not in strip S{symbol}")
    if symbol == 0:
        x = base + 5.0 * frac
    else:
        x = base + 5.0 * (frac - 0.6) + 1.0
    return LiftPoint(x, BANDS[symbol] + (p.r - SQUARE[0]) / 5.0)


class _ExactOrbit:
    """Orbit of the coded point under the geometric map, in exact rationals."""

    def __init__(self, code: SymbolCode, depth: int):
        self.y0 = _coded_exact(code.symbols(depth))

    def run(self, n):
        """Yield ``(k, branch, lifted x1, fractional x)``; stops early if the point leaves both strips."""
        y = self.y0
        shift = 0
        for k in range(n + 1):
            br = -1
            if 0 <= y <= Fraction(1, 5):
                br = 0
            elif Fraction(3, 5) <= y <= Fraction(4, 5):
                br = 1
            yield k, br, shift + y, y
            if k == n:
                return
            if br < 0:
                return
            y = 5 * y - 3 * br
            shift += br


@dataclass(frozen=True)
class ShiftReport:
    max_dev: float
    passed: bool
    slack: float


def verify_shift_bound(code: SymbolCode, n: int, depth: int | None = None) -> ShiftReport:
    """Max over k <= n of ``|(F^k x)_1 - (x)_1 - s_k|`` for the coded point x.

    The orbit is iterated in exact rational arithmetic, choosing the branch
    from the strip the point actually lies in.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    depth = n + 20 if depth is None else depth
    a = code.symbols(n)
    s = code.partial_sums(n)
    orbit = _ExactOrbit(code, depth)
    x0 = orbit.y0
    dev = Fraction(0)
    last = -1
    for k, br, lifted, _ in orbit.run(n):
        last = k
        if k < n and br != a[k]:
            raise NumericalError(f"depth {depth} insufficient: itinerary leaves the code at step {k}")
        dev = max(dev, abs(lifted - x0 - int(s[k])))
    if last < n:
        raise NumericalError(f"depth {depth} insufficient: orbit leaves the strips at step {last}")
    d = float(dev)
    return ShiftReport(max_dev=d, passed=d <= 1.0, slack=1.0 - d)


@dataclass(frozen=True)
class ItineraryReport:
    passed: bool
    mismatch_index: int
    max_line_error: float


def _coded_exact(symbols) -> Fraction:
    z = Fraction(1, 2)
    for s in symbols[::-1]:
        z = z / 5 + Fraction(3 * int(s), 5)
    return z


def itinerary_shift_check(code: SymbolCode, n: int, depth: int) -> ItineraryReport:
    """Check the geometric itinerary of the coded point against ``a_0..a_n``.

    Also checks that after k steps the point lies within ``5**-(depth-n)`` of
    the line coded by the k-times shifted sequence (resolved to ``depth``
    symbols, or as many as a finite code has).
    """
    if depth < n + 20:
        raise PreconditionError("depth must be >= n + 20")
    avail = min(depth + n, code.length)
    a = code.symbols(int(avail))
    orbit = _ExactOrbit(code, depth)
    tol = Fraction(1, 5 ** (depth - n))
    worst = Fraction(0)
    for k, br, _, y in orbit.run(n):
        if br != a[k]:
            return ItineraryReport(False, k, float(worst))
        z = _coded_exact(a[k:k + depth])
        worst = max(worst, abs(y - z))
    return ItineraryReport(worst <= tol, -1, float(worst))


@dataclass(frozen=True)
class RotationProxies:
    liminf_proxy: float
    limsup_proxy: float


def rotation_bounds_from_code(code: SymbolCode, n: int) -> RotationProxies:
    """Running min/max of ``s_k / k`` over the tail ``k in [n/2, n]``."""
    if n < 16:
        raise PreconditionError("n must be >= 16")
    s = code.partial_sums(n)
    k = np.arange(n // 2, n + 1)
    dens = s[k] / k
    return RotationProxies(float(dens.min()), float(dens.max()))


class HorseshoeSystem(StringSystem):
    """Orbit of the coded point, driven by its code inside the square."""

    name = "horseshoe"
    compact_cutoff = SQUARE[0]
    backward_available = False

    def __init__(self, code: SymbolCode, seed_depth: int = 60):
        super().__init__()
        self.code = code
        self.name = f"horseshoe[{code.label}]"
        depth = min(seed_depth, code.length) if code.length != math.inf else seed_depth
        self.seeds = {"x": code_to_point(code, int(depth))}

    def orbit(self, seed, n_max, direction=FORWARD):
        check_direction(direction)
        self.resolve_seed(seed)
        if direction == BACKWARD:
            raise UnsupportedSourceError("horseshoe orbits are defined forward from their code only")
        depth = n_max + 30
        if depth > self.code.length:
            depth = n_max
        a = self.code.symbols(depth)
        y = kernels.coded_fractions(a, 0.5)[: n_max + 1]
        s = np.concatenate([[0], np.cumsum(a[:n_max])])
        x1 = s + y
        r = np.empty(n_max + 1)
        r[0] = MID_HEIGHT
        lows = np.where(a[:n_max] == 1, BANDS[1], BANDS[0])
        for k in range(n_max):
            r[k + 1] = lows[k] + (r[k] - SQUARE[0]) / 5.0
        return x1, r
