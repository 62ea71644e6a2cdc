import numpy as np
import pytest

from annulus_rotation import (CallableMap, LiftPoint, PreconditionError, RigidRotation,
                              UnsupportedSourceError, check_deck_commutation, deck, displacement,
                              displacement_bound)
from annulus_rotation.gallery import BoomerangSystem


def test_liftpoint_rejects_positive_r():
    with pytest.raises(PreconditionError):
        LiftPoint(0.0, 0.1)
    assert tuple(LiftPoint(1.0, 0.0)) == (1.0, 0.0)


def test_deck_powers():
    p = LiftPoint(0.25, -1.0)
    assert deck(p, 3) == LiftPoint(3.25, -1.0)
    assert deck(deck(p, 2), -2) == p


def test_rigid_orbit_closed_form():
    x, r = RigidRotation(1 / 3).orbit(LiftPoint(0.0, -1.0), 3)
    np.testing.assert_allclose(x, [0, 1 / 3, 2 / 3, 1], atol=1e-15)
    assert np.all(r == -1.0)


def test_identity_orbit_constant():
    ident = CallableMap(lambda x, r: (x, r), lambda x, r: (x, r), name="id")
    x, r = ident.orbit(LiftPoint(0.3, -2.0), 10, "backward")
    assert np.all(x == 0.3) and np.all(r == -2.0)


def test_callable_without_inverse():
    fwd_only = CallableMap(lambda x, r: (x + 0.1, r))
    assert not fwd_only.invertible
    with pytest.raises(UnsupportedSourceError):
        fwd_only.orbit(LiftPoint(0, -1), 3, "backward")


def test_displacement_and_bound():
    rot = RigidRotation(0.2)
    assert displacement(rot, LiftPoint(5.0, -3.0)) == pytest.approx(0.2)
    b = displacement_bound(rot, (-3.0, -1.0), 64)
    assert b.grid_sup == pytest.approx(0.2)
    assert b.value == pytest.approx(0.22)
    with pytest.raises(PreconditionError):
        displacement_bound(rot, (-1.0, -3.0))
    with pytest.raises(UnsupportedSourceError):
        displacement(BoomerangSystem(), LiftPoint(0, -1))


def test_deck_commutation_detects_broken_lift():
    good = CallableMap(lambda x, r: (x + 0.1 * np.sin(2 * np.pi * x), r))
    bad = CallableMap(lambda x, r: (x + 0.01 * x, r))
    assert check_deck_commutation(good, 1000).passed
    rep = check_deck_commutation(bad, 1000)
    assert not rep.passed and rep.max_error == pytest.approx(0.01)


def test_string_system_rejects_foreign_seed():
    b = BoomerangSystem()
    with pytest.raises(UnsupportedSourceError):
        b.resolve_seed(LiftPoint(0.0, -1.0))
    with pytest.raises(PreconditionError):
        b.resolve_seed("nope")
    assert b.point("p", 0) == b.seeds["p"]
