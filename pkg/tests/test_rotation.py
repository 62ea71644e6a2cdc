import numpy as np
import pytest

from annulus_rotation import (CallableMap, LiftPoint, PreconditionError, RegionError, RigidRotation,
                              UnsupportedSourceError, classify_drift, drift_series, empirical_measure_rotation,
                              h1_check, h2_witness_search, iterate_orbit, rotation_estimate,
                              subsampled_drift_gap)
from annulus_rotation.cover import deck
from annulus_rotation.rotation import (DriftKind, OrbitSeries, dyadic_windows, round_trip_error, summary_dict,
                                       telescoping_error)

WAVY = CallableMap(lambda x, r: (x + 0.3 + 0.1 * np.sin(2 * np.pi * x), r), name="wavy")


def synthetic(values):
    """Series whose drift against rho = 0 is ``values``."""
    values = np.asarray(values, dtype=float)
    n = np.arange(values.size)
    return OrbitSeries("forward", n, values, np.full(values.size, -1.0), LiftPoint(values[0], -1.0),
                       values - values[0], -1.0, -1.0)


def kind(values):
    return classify_drift(drift_series(synthetic(values), 0.0)).kind


def test_dyadic_windows():
    assert dyadic_windows(10) == [(1, 2), (2, 4), (4, 8), (8, 11)]
    assert dyadic_windows(1) == [(1, 2)]


def test_rigid_orbit_rotation():
    s = iterate_orbit(RigidRotation(0.25), LiftPoint(0.0, -1.0), 1000)
    est = rotation_estimate(s)
    assert est.estimate == pytest.approx(0.25, abs=1e-14)
    assert est.tail_slope == pytest.approx(0.25, abs=1e-12)
    b = iterate_orbit(RigidRotation(0.25), LiftPoint(0.0, -1.0), 100, "backward")
    assert b.n_values[-1] == -100 and b.cumulative[-1] == pytest.approx(-25.0)


def test_rotation_estimate_needs_points():
    with pytest.raises(PreconditionError):
        rotation_estimate(iterate_orbit(RigidRotation(0.1), LiftPoint(0, -1), 10))


def test_drift_deck_invariance():
    p = LiftPoint(0.37, -1.2)
    a = iterate_orbit(WAVY, p, 2000)
    for k in (-7, 1, 12):
        b = iterate_orbit(WAVY, deck(p, k), 2000)
        assert np.max(np.abs(drift_series(a, 0.3).values - drift_series(b, 0.3).values)) <= 1e-12
        assert b.x1[-1] - a.x1[-1] == pytest.approx(k, abs=1e-9)


def test_classification_synthetic():
    n = np.arange(4096, dtype=float)
    assert kind(np.sqrt(n)) is DriftKind.UNBOUNDED_ABOVE
    assert kind(-np.sqrt(n)) is DriftKind.UNBOUNDED_BELOW
    assert kind(np.sqrt(n) * np.cos(np.pi * n)) is DriftKind.OSCILLATING
    assert kind(np.sin(n)) is DriftKind.BOUNDED
    cls = classify_drift(drift_series(synthetic(np.sin(n)), 0.0))
    assert cls.bound == pytest.approx(np.abs(np.sin(n)).max())
    assert cls.name.startswith("Bounded(")
    # a single late jump is neither a growth pattern nor bounded
    late = np.zeros(4096)
    late[4000] = 5.0
    assert kind(late) is DriftKind.INCONCLUSIVE


def test_classification_needs_horizon():
    with pytest.raises(PreconditionError):
        kind(np.zeros(100))


def test_rigid_drift_is_exactly_zero():
    s = iterate_orbit(RigidRotation(1 / 3), LiftPoint(0.0, -1.0), 1000)
    cls = classify_drift(drift_series(s, 1 / 3))
    assert cls.kind is DriftKind.BOUNDED and cls.bound < 1e-12


def test_subsampled_gap_bound():
    for b in (1, 2, 3, 7):
        for k in (0, 2):
            rep = subsampled_drift_gap(WAVY, LiftPoint(0.1, -1.0), b, k, 0.3, 3000, grid_density=128)
            assert rep.passed and rep.max_gap <= rep.bound
    with pytest.raises(RegionError):
        subsampled_drift_gap(RigidRotation(0.1), LiftPoint(0, -1.0), 2, 0, 0.1, 100, region=(-0.5, 0.0))
    with pytest.raises(UnsupportedSourceError):
        from annulus_rotation.gallery import BoomerangSystem
        subsampled_drift_gap(BoomerangSystem(), "p", 2, 0, 0.0, 100)


def test_h1_rigid():
    s = iterate_orbit(RigidRotation(0.4), LiftPoint(0.0, -1.0), 4096)
    res = h1_check(s, 0.3, 1, 3)
    assert res.holds_limsup and res.holds_linear
    flat = iterate_orbit(RigidRotation(1 / 3), LiftPoint(0.0, -1.0), 4096)
    res = h1_check(flat, 1 / 3, 1, 3)
    assert not res.holds_limsup and not res.holds_linear
    with pytest.raises(PreconditionError):
        h1_check(s, 0.5, 1, 3)


def test_h2_rigid():
    # every point is fixed by T^-1 F^3 when the rotation is 1/3
    assert h2_witness_search(RigidRotation(1 / 3), LiftPoint(0.0, -1.0), 1, 3, 0, 3000) is None
    # rotation 0.4: T^-1 F^3 moves everything by 0.2
    w = h2_witness_search(RigidRotation(0.4), LiftPoint(0.0, -1.0), 1, 3, 0, 3000)
    assert w is not None
    assert w.image_distance == pytest.approx(0.2, abs=1e-9)
    assert all(np.diff(w.deck_counts) > 0) and w.cluster_diameter < 1e-2


def test_empirical_measure_and_telescoping():
    assert empirical_measure_rotation(RigidRotation(0.2), LiftPoint(0.5, -1.0), 500) == pytest.approx(0.2)
    s = iterate_orbit(WAVY, LiftPoint(0.1, -1.0), 1000)
    assert empirical_measure_rotation(WAVY, LiftPoint(0.1, -1.0), 1000) == pytest.approx(s.cumulative[-1] / 1000)
    assert telescoping_error(WAVY, LiftPoint(0.1, -1.0), 1000) <= 1000 * 1e-12


def test_round_trip(transverse):
    assert round_trip_error(transverse.source, LiftPoint(0.3, -1.5), 200) <= 1e-7


def test_orbit_rejects_backward_without_inverse():
    with pytest.raises(UnsupportedSourceError):
        iterate_orbit(CallableMap(lambda x, r: (x, r)), LiftPoint(0, -1), 5, "backward")
    with pytest.raises(PreconditionError):
        iterate_orbit(RigidRotation(0.1), LiftPoint(0, -1), 0)


def test_summary_keys():
    s = iterate_orbit(RigidRotation(0.5), LiftPoint(0, -1), 300)
    d = summary_dict(s, 0.5)
    assert set(d) == {"rotation_estimate", "tail_slope", "residual", "drift_max", "drift_min", "min_r",
                      "classification"}
    assert d["classification"] == "Bounded(0)"


def test_rigid_third_is_exact():
    s = iterate_orbit(RigidRotation(1 / 3), LiftPoint(0.0, -1.0), 300)
    assert rotation_estimate(s).estimate == 1 / 3


def test_h1_on_half_density_horseshoe():
    from annulus_rotation import HorseshoeSystem, SymbolCode
    s = iterate_orbit(HorseshoeSystem(SymbolCode.periodic("10")), "x", 4096)
    res = h1_check(s, 0.0, 0, 1)
    assert res.holds_limsup and res.holds_linear
    assert res.tail_slope == pytest.approx(0.5, abs=1e-3)
