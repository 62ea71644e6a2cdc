"""Universal cover of the half-open annulus and the dynamical-system contract.

Points of the cover R x (-inf, 0] are :class:`LiftPoint` values.  The first
coordinate is the lifted angle measured in deck units, so the deck
transformation is ``(x1, r) -> (x1 + 1, r)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError, PreconditionError, UnsupportedSourceError

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True, slots=True)
class LiftPoint:
    x1: float
    r: float

    def __post_init__(self):
        if not self.r <= 0.0:
            raise PreconditionError(f"radial coordinate must be <= 0, got {self.r!r}")

    def __iter__(self):
        yield self.x1
        yield self.r


def deck(p: LiftPoint, k: int = 1) -> LiftPoint:
    """Apply the k-th power of the deck transformation."""
    return LiftPoint(p.x1 + k, p.r)


def check_direction(direction: str) -> str:
    if direction not in (FORWARD, BACKWARD):
        raise PreconditionError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return direction


class OrbitSource:
    """Something that produces lifted orbits.

    Subclasses are either :class:`FullMap` (evaluable everywhere) or
    :class:`StringSystem` (dynamics known only along designated orbits).
    ``compact_cutoff`` is the lowest radial level an orbit may reach and still
    count as bounded.
    """

    kind = "abstract"
    name = "source"
    compact_cutoff = -np.inf

    def orbit(self, seed, n_max: int, direction: str = FORWARD):
        """Arrays ``(x1, r)`` of length ``n_max + 1`` starting at ``seed``."""
        raise NotImplementedError


class FullMap(OrbitSource):
    """A lift F of an annulus homeomorphism, evaluated on arrays.

    ``forward`` and ``backward`` take array-likes ``x1, r`` and return a tuple
    of arrays of the same shape.
    """

    kind = "full"

    def forward(self, x1, r):
        raise NotImplementedError

    def backward(self, x1, r):
        raise NotImplementedError

    @property
    def invertible(self) -> bool:
        return True

    def __call__(self, p: LiftPoint) -> LiftPoint:
        x, r = self.forward(p.x1, p.r)
        return LiftPoint(float(x), float(r))

    def inverse(self, p: LiftPoint) -> LiftPoint:
        x, r = self.backward(p.x1, p.r)
        return LiftPoint(float(x), float(r))

    def orbit(self, seed, n_max, direction=FORWARD):
        check_direction(direction)
        step = self.forward if direction == FORWARD else self.backward
        if direction == BACKWARD and not self.invertible:
            raise UnsupportedSourceError(f"{self.name}: backward evaluation unavailable")
        xs = np.empty(n_max + 1)
        rs = np.empty(n_max + 1)
        x, r = float(seed.x1), float(seed.r)
        xs[0], rs[0] = x, r
        for k in range(1, n_max + 1):
            x, r = step(x, r)
            xs[k], rs[k] = x, r
        return xs, rs


class StringSystem(OrbitSource):
    """Dynamics prescribed on invariant strings, evaluable only from named seeds."""

    kind = "string"
    backward_available = True

    def __init__(self):
        self.seeds: dict[str, LiftPoint] = {}

    def resolve_seed(self, seed) -> str:
        if isinstance(seed, str):
            if seed not in self.seeds:
                raise PreconditionError(f"{self.name}: unknown seed {seed!r}")
            return seed
        for key, p in self.seeds.items():
            if p == seed:
                return key
        raise UnsupportedSourceError(f"{self.name}: string systems only run from their designated seeds")

    def point(self, seed, n: int) -> LiftPoint:
        direction = FORWARD if n >= 0 else BACKWARD
        xs, rs = self.orbit(seed, abs(n), direction)
        return LiftPoint(float(xs[-1]), float(rs[-1]))


class RigidRotation(FullMap):
    """``(x1, r) -> (x1 + alpha, r)``; orbits use the closed form ``x1 + n alpha``."""

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.name = f"rotation({alpha:g})"

    def forward(self, x1, r):
        return np.asarray(x1, dtype=float) + self.alpha, np.asarray(r, dtype=float) * 1.0

    def backward(self, x1, r):
        return np.asarray(x1, dtype=float) - self.alpha, np.asarray(r, dtype=float) * 1.0

    def orbit(self, seed, n_max, direction=FORWARD):
        check_direction(direction)
        sign = 1.0 if direction == FORWARD else -1.0
        n = np.arange(n_max + 1, dtype=float)
        return seed.x1 + sign * n * self.alpha, np.full(n_max + 1, float(seed.r))


class CallableMap(FullMap):
    """Wrap plain vectorized functions as a :class:`FullMap`."""

    def __init__(self, forward: Callable, backward: Callable | None = None, name="callable",
                 compact_cutoff=-np.inf):
        self._fwd = forward
        self._bwd = backward
        self.name = name
        self.compact_cutoff = compact_cutoff

    def forward(self, x1, r):
        return self._fwd(np.asarray(x1, dtype=float), np.asarray(r, dtype=float))

    def backward(self, x1, r):
        if self._bwd is None:
            raise UnsupportedSourceError(f"{self.name}: no inverse supplied")
        return self._bwd(np.asarray(x1, dtype=float), np.asarray(r, dtype=float))

    @property
    def invertible(self):
        return self._bwd is not None


def require_full(src: OrbitSource, what: str) -> FullMap:
    if not isinstance(src, FullMap):
        raise UnsupportedSourceError(f"{what} needs a full map; {src.name} is a string system")
    return src


def displacement(src: OrbitSource, p: LiftPoint) -> float:
    """One-step angular displacement ``(F(p))_1 - (p)_1``."""
    src = require_full(src, "displacement")
    x, _ = src.forward(p.x1, p.r)
    return float(x) - p.x1


def displacement_field(src: FullMap, x1, r) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    fx, _ = src.forward(x1, r)
    return np.asarray(fx) - x1


@dataclass(frozen=True)
class DisplacementBound:
    value: float
    region: tuple[float, float]
    grid_sup: float
    safety: float = 1.1


def displacement_bound(src: OrbitSource, region: tuple[float, float], grid_density: int = 512,
                       safety: float = 1.1) -> DisplacementBound:
    """Translation-invariant bound for |u| on ``[0, 1) x [r_min, r_max]``.

    The sup of |u| over a ``grid_density x grid_density`` grid, scaled by
    ``safety``.  One deck period in x1 suffices because u is deck invariant.
    """
    src = require_full(src, "displacement_bound")
    r_min, r_max = float(region[0]), float(region[1])
    if not (np.isfinite(r_min) and np.isfinite(r_max)) or r_min > r_max or r_max > 0.0:
        raise PreconditionError(f"empty or invalid region {region!r}")
    if grid_density < 1:
        raise PreconditionError("grid_density must be positive")
    xs = np.arange(grid_density) / grid_density
    rs = np.linspace(r_min, r_max, grid_density) if grid_density > 1 else np.array([r_min])
    X, R = np.meshgrid(xs, rs, indexing="ij")
    u = displacement_field(src, X.ravel(), R.ravel())
    if not np.all(np.isfinite(u)):
        raise NumericalError(f"{src.name}: non-finite displacement on region {region!r}")
    sup = float(np.max(np.abs(u)))
    return DisplacementBound(value=safety * sup, region=(r_min, r_max), grid_sup=sup, safety=safety)


@dataclass(frozen=True)
class DeckReport:
    max_error: float
    passed: bool
    samples: int


def check_deck_commutation(src: OrbitSource, sample_count: int = 1000, tol: float = 1e-9,
                           seed: int = 0, x_range=(-5.0, 5.0), r_range=(-3.0, 0.0)) -> DeckReport:
    """Max of ``|F(T p) - T F(p)|`` over random samples."""
    src = require_full(src, "check_deck_commutation")
    rng = np.random.default_rng(seed)
    x = rng.uniform(*x_range, sample_count)
    r = rng.uniform(*r_range, sample_count)
    fx, fr = src.forward(x, r)
    tx, tr = src.forward(x + 1.0, r)
    err = np.hypot(np.asarray(tx) - (np.asarray(fx) + 1.0), np.asarray(tr) - np.asarray(fr))
    max_error = float(np.max(err)) if err.size else 0.0
    return DeckReport(max_error=max_error, passed=bool(max_error <= tol), samples=sample_count)
