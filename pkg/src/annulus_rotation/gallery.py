"""Explicit systems with an invariant set X, marked accessible points and a known
prime end rotation number.

* ``periodic:a/b``: rigid rotation by a/b; X is b vertical strings plus the
  region r <= -2.
* ``transverse``: two strings moving in opposite radial directions, so one
  marked point drifts forward and the other backward.  Prime end rotation 0.
* ``boomerang``: strings whose drift grows in both time directions while the
  prime end rotation number is 0.
* ``horseshoe``: the rotational horseshoe of :mod:`annulus_rotation.horseshoe`.

In the transverse and boomerang systems the radial coordinate r in (-2, -1]
is the compression ``psi(rho) = 1 / (rho^2 + 1) - 2`` of a model radius
``rho <= 0``; the model lives on the full half-line, which keeps the
recurrences simple.
"""
from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .cover import (BACKWARD, FORWARD, FullMap, LiftPoint, OrbitSource, RigidRotation,
                    StringSystem, check_direction)
from .errors import PreconditionError, UnsupportedSourceError
from .horseshoe import SQUARE, STRIPS, HorseshoeSystem, SymbolCode

TWO_PI = 2.0 * math.pi
RHO_SAMPLE_MAX = 10.0  # model radii sampled for invariance checks: rho in [-10, 0]


def psi(rho):
    """Compression of the model half-line ``rho <= 0`` onto ``(-2, -1]``."""
    rho = np.asarray(rho, dtype=float)
    return 1.0 / (rho * rho + 1.0) - 2.0


def psi_inv(s):
    s = np.asarray(s, dtype=float)
    return -np.sqrt(np.maximum(1.0 / (s + 2.0) - 1.0, 0.0))


def twist(rho):
    """Angular offset ``rho sin(2 pi rho)`` of the twist."""
    return rho * np.sin(TWO_PI * rho)


def transverse_delta(rho):
    rho = np.asarray(rho, dtype=float)
    return kernels.TRANSVERSE_AMP * rho * rho / (1.0 + rho ** 4)


def fiber_monotonicity(amp: float = kernels.TRANSVERSE_AMP, rho_min: float = -50.0, points: int = 200_001) -> float:
    """Smallest ``d rho' / d rho`` of ``rho -> rho -+ delta(rho)`` on a grid.

    Positive means the radial push is a homeomorphism of each fiber.
    """
    r = np.linspace(rho_min, 0.0, points)
    dd = amp * 2.0 * r * (1.0 - r ** 4) / (1.0 + r ** 4) ** 2
    return float(1.0 - np.abs(dd).max())


def _circ_dist(a, b):
    d = np.mod(np.asarray(a, dtype=float) - b, 1.0)
    return np.minimum(d, 1.0 - d)


# ---------------------------------------------------------------------------
# proxies for the prime end dynamics
# ---------------------------------------------------------------------------

class CircleProxy:
    """Lifted circle map whose rotation number is the prime end rotation number."""

    def __init__(self, description: str, lift: Callable[[float], float], x0: float = 0.0):
        self.description = description
        self.lift = lift
        self.x0 = float(x0)

    def rotation(self, n: int) -> float:
        x = self.x0
        for _ in range(n):
            x = self.lift(x)
        return (x - self.x0) / n


class RigidProxy(CircleProxy):
    def __init__(self, description: str, alpha: float):
        super().__init__(description, lambda x: x + alpha)
        self.alpha = alpha

    def rotation(self, n: int) -> float:
        return (n * self.alpha) / n


@dataclass(frozen=True)
class MarkedSystem:
    """A source together with its invariant set, marked points and ``rho_hat``.

    ``membership(x1, r, tol)`` is vectorized and tests membership of lifted
    points in X.  ``sampler(rng, count)`` draws members of X (full maps only).
    """

    name: str
    source: OrbitSource
    marked_points: dict
    membership: Callable
    rho_hat: float | None
    proxy: CircleProxy | None
    sampler: Callable | None = None

    def contains(self, p: LiftPoint, tol: float = 1e-8) -> bool:
        return bool(np.all(self.membership(np.array([p.x1]), np.array([p.r]), tol)))


# ---------------------------------------------------------------------------
# periodic strings
# ---------------------------------------------------------------------------

def build_periodic_strings(a: int, b: int) -> MarkedSystem:
    if b < 1 or math.gcd(a, b) != 1:
        raise PreconditionError(f"need b >= 1 and gcd(a, b) = 1, got ({a}, {b})")
    alpha = a / b
    src = RigidRotation(alpha)
    src.name = f"periodic:{a}/{b}"

    def member(x1, r, tol):
        x1, r = np.asarray(x1, dtype=float), np.asarray(r, dtype=float)
        on_string = (r <= -1.0 + tol) & (_circ_dist(x1 * b, 0.0) <= tol * b)
        return (r <= -2.0 + tol) | on_string

    def sample(rng, count):
        j = rng.integers(0, b, count)
        k = rng.integers(-3, 4, count)
        r = rng.uniform(-3.0, -1.0, count)
        return k + j / b, r

    return MarkedSystem(name=src.name, source=src, marked_points={"p": LiftPoint(0.0, -1.0)},
                        membership=member, rho_hat=alpha,
                        proxy=RigidProxy(f"rotation by {a}/{b}", alpha), sampler=sample)


# ---------------------------------------------------------------------------
# transverse example
# ---------------------------------------------------------------------------

class TransverseMap(FullMap):
    """``psi o twist o h o twist^-1 o psi^-1`` on ``-2 < r < -1``, identity elsewhere.

    ``h(theta, rho) = (theta, rho - delta(rho) cos(2 pi theta))`` pushes the
    string theta = 0 down and the string theta = 1/2 up.
    """

    name = "transverse"
    compact_cutoff = -2.0

    @staticmethod
    def _model(x1, r):
        x1 = np.asarray(x1, dtype=float)
        r = np.asarray(r, dtype=float)
        inside = (r > -2.0) & (r < -1.0)
        rho = np.where(inside, psi_inv(np.where(inside, r, -1.5)), 0.0)
        theta = x1 - twist(rho)
        return x1, r, inside, rho, theta

    def forward(self, x1, r):
        x1, r, inside, rho, theta = self._model(x1, r)
        rho2 = rho - transverse_delta(rho) * np.cos(TWO_PI * theta)
        return np.where(inside, theta + twist(rho2), x1), np.where(inside, psi(rho2), r)

    def backward(self, x1, r):
        x1, r, inside, rho, theta = self._model(x1, r)
        flat_rho = np.atleast_1d(rho).ravel()
        flat_c = np.atleast_1d(np.cos(TWO_PI * theta)).ravel()
        rho2 = kernels.transverse_radii(flat_rho, flat_c, 1, forward=False)[:, 1].reshape(np.shape(rho))
        return np.where(inside, theta + twist(rho2), x1), np.where(inside, psi(rho2), r)

    def orbit(self, seed, n_max, direction=FORWARD):
        check_direction(direction)
        if not -2.0 < seed.r < -1.0:
            return np.full(n_max + 1, float(seed.x1)), np.full(n_max + 1, float(seed.r))
        rho0 = float(psi_inv(seed.r))
        theta = seed.x1 - float(twist(rho0))
        rho = kernels.transverse_radii(np.array([rho0]), np.array([math.cos(TWO_PI * theta)]),
                                       n_max, forward=direction == FORWARD)[0]
        x1 = theta + twist(rho)
        x1[0] = seed.x1
        r = psi(rho)
        r[0] = seed.r
        return x1, r


def build_transverse_example() -> MarkedSystem:
    src = TransverseMap()
    strings = np.array([0.0, 0.5])

    def member(x1, r, tol):
        x1, r = np.asarray(x1, dtype=float), np.asarray(r, dtype=float)
        inside = (r > -2.0) & (r <= -1.0)
        rho = psi_inv(np.where(inside, r, -1.5))
        theta = x1 - twist(rho)
        d = np.minimum(_circ_dist(theta, strings[0]), _circ_dist(theta, strings[1]))
        return (r <= -2.0 + tol) | (inside & (d <= tol))

    def sample(rng, count):
        rho = rng.uniform(-RHO_SAMPLE_MAX, 0.0, count)
        theta = rng.choice(strings, count) + rng.integers(-3, 4, count)
        low = rng.random(count) < 0.1
        x1 = np.where(low, rng.uniform(-3.0, 3.0, count), theta + twist(rho))
        r = np.where(low, rng.uniform(-4.0, -2.0, count), psi(rho))
        return x1, r

    marked = {"q": LiftPoint(0.0, float(psi(-1.0))), "p": LiftPoint(0.5, float(psi(-1.0)))}
    proxy = CircleProxy("the map on the fixed circle r = -1",
                        lambda x: float(src.forward(x, -1.0)[0]), 0.0)
    return MarkedSystem(name="transverse", source=src, marked_points=marked, membership=member,
                        rho_hat=0.0, proxy=proxy, sampler=sample)


# ---------------------------------------------------------------------------
# boomerang example
# ---------------------------------------------------------------------------

def tau(theta, c):
    return theta + 0.5 * c * (1.0 - np.cos(TWO_PI * theta))


def boomerang_c(rho):
    return kernels.BOOMERANG_AMP / (1.0 + np.asarray(rho, dtype=float) ** 2)


class BoomerangSystem(StringSystem):
    """String ``n`` sits at model radius ``r_n`` with angle ``tau_{r_n}^n(1/2)``.

    After the twist ``theta -> theta - r`` and compression, the lifted point
    at time n is ``(tau_{r_n}^n(1/2) - r_n, psi(r_n))``.
    """

    name = "boomerang"
    compact_cutoff = -2.0
    backward_available = True

    def __init__(self, r0: float = -1.0, theta0: float = 0.5):
        super().__init__()
        self.r0 = float(r0)
        self.theta0 = float(theta0)
        self.seeds = {"p": LiftPoint(self.theta0 - self.r0, float(psi(self.r0)))}
        # the O(n^2) angle computation is cached; shorter requests are prefixes
        self._cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def model_orbit(self, n_max, direction=FORWARD):
        """Model radii ``r_n`` and angles ``theta_n`` for ``|n| <= n_max``."""
        check_direction(direction)
        with self._lock:
            hit = self._cache.get(direction)
            if hit is None or hit[0].size < n_max + 1:
                radii = kernels.boomerang_radii(self.r0, n_max, direction == FORWARD)
                steps = np.arange(n_max + 1)
                if direction == BACKWARD:
                    steps = -steps
                hit = (radii, kernels.boomerang_thetas(radii, steps, self.theta0))
                hit[0].setflags(write=False)
                hit[1].setflags(write=False)
                self._cache[direction] = hit
        return hit[0][: n_max + 1], hit[1][: n_max + 1]

    def orbit(self, seed, n_max, direction=FORWARD):
        self.resolve_seed(seed)
        radii, theta = self.model_orbit(n_max, direction)
        return theta - radii, psi(radii)


@functools.lru_cache(maxsize=4)
def build_boomerang_example(search: int = 2000) -> MarkedSystem:
    """Boomerang strings; membership searches string indices ``|n| <= search``.

    Systems are immutable, so the instance (and its orbit cache) is shared.
    """
    src = BoomerangSystem()

    def member(x1, r, tol):
        x1, r = np.atleast_1d(np.asarray(x1, dtype=float)), np.atleast_1d(np.asarray(r, dtype=float))
        out = r <= -2.0 + tol
        inside = (r > -2.0) & (r <= -1.0)
        rho = psi_inv(np.where(inside, r, -1.5))
        theta = x1 + rho  # undo the twist theta -> theta - rho
        c = boomerang_c(rho)
        best = _circ_dist(theta, 0.0)  # limit curve theta = 0
        fw = np.full_like(theta, src.theta0)
        bw = fw.copy()
        best = np.minimum(best, _circ_dist(theta, fw))
        for _ in range(search):
            fw = tau(fw, c)
            bw = kernels._tau_inverse_np(bw, c)
            best = np.minimum(best, np.minimum(_circ_dist(theta, fw), _circ_dist(theta, bw)))
        return out | (inside & (best <= tol))

    proxy = CircleProxy("tau_0 on the circle at the bottom of the strings",
                        lambda x: float(tau(x, boomerang_c(0.0))), src.theta0)
    return MarkedSystem(name="boomerang", source=src, marked_points={"p": "p"}, membership=member,
                        rho_hat=0.0, proxy=proxy)


# ---------------------------------------------------------------------------
# horseshoe
# ---------------------------------------------------------------------------

def build_horseshoe(code="periodic:10", check_depth: int = 12) -> MarkedSystem:
    """Horseshoe system for ``code``.  No prime end proxy is attached."""
    if isinstance(code, str):
        code = SymbolCode.parse(code)
    src = HorseshoeSystem(code)

    def member(x1, r, tol):
        # points whose forward itinerary stays in the strips for check_depth steps
        x1, r = np.atleast_1d(np.asarray(x1, dtype=float)), np.atleast_1d(np.asarray(r, dtype=float))
        y = np.mod(x1, 1.0)
        ok = (r >= SQUARE[0] - tol) & (r <= SQUARE[1] + tol)
        for k in range(check_depth):
            slack = tol * 5.0 ** k
            s0 = (y >= STRIPS[0][0] - slack) & (y <= STRIPS[0][1] + slack)
            s1 = (y >= STRIPS[1][0] - slack) & (y <= STRIPS[1][1] + slack)
            ok &= s0 | s1
            y = np.where(s1, 5.0 * (y - 0.6), 5.0 * y)
        return ok

    return MarkedSystem(name=src.name, source=src, marked_points={"x": "x"}, membership=member,
                        rho_hat=None, proxy=None)


def build_system(name: str, code: str | None = None) -> MarkedSystem:
    """Look up a system by name: ``periodic:a/b``, ``transverse``, ``boomerang``, ``horseshoe``."""
    name = name.strip()
    if name.startswith("periodic:"):
        try:
            a, b = (int(v) for v in name.split(":", 1)[1].split("/"))
        except ValueError as exc:
            raise PreconditionError(f"bad periodic system {name!r}; expected periodic:a/b") from exc
        return build_periodic_strings(a, b)
    if name == "transverse":
        return build_transverse_example()
    if name == "boomerang":
        return build_boomerang_example()
    if name == "horseshoe":
        return build_horseshoe(code or "periodic:10")
    raise PreconditionError(f"unknown system {name!r}")


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    fraction: float
    samples: int
    failures: int


def verify_invariance(sys: MarkedSystem, samples: int = 1000, tol: float = 1e-8, seed: int = 0,
                      orbit_span: int = 500) -> InvarianceReport:
    """Fraction of sampled members of X whose image is again in X.

    Full maps: members are drawn by the system's sampler and mapped once.
    String systems: members are points of the marked orbits at ``|n| <
    orbit_span`` and their images are the next orbit points.
    """
    src = sys.source
    rng = np.random.default_rng(seed)
    if isinstance(src, FullMap):
        if sys.sampler is None:
            raise UnsupportedSourceError(f"{sys.name}: no sampler for members of X")
        x1, r = sys.sampler(rng, samples)
        before = sys.membership(x1, r, tol)
        if not np.all(before):
            raise PreconditionError(f"{sys.name}: sampler produced non-members")
        fx, fr = src.forward(x1, r)
        ok = sys.membership(fx, fr, tol)
    else:
        xs, rs = [], []
        for key in sys.marked_points.values():
            for direction in (FORWARD, BACKWARD):
                if direction == BACKWARD and not src.backward_available:
                    continue
                x, r = src.orbit(key, orbit_span, direction)
                xs.append(x if direction == FORWARD else x[::-1])
                rs.append(r if direction == FORWARD else r[::-1])
        x = np.concatenate(xs)
        r = np.concatenate(rs)
        idx = rng.integers(0, x.size, samples)
        ok = sys.membership(x[idx], r[idx], tol)
    ok = np.asarray(ok, dtype=bool)
    fails = int(ok.size - np.count_nonzero(ok))
    return InvarianceReport(fraction=1.0 - fails / ok.size, samples=int(ok.size), failures=fails)


def proxy_prime_end_rotation(sys: MarkedSystem, n: int) -> float:
    if sys.proxy is None:
        raise PreconditionError(f"{sys.name}: missing proxy")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return sys.proxy.rotation(n)
