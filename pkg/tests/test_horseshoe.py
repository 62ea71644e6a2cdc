from fractions import Fraction

import numpy as np
import pytest

from annulus_rotation import (NumericalError, PreconditionError, SymbolCode, UnsupportedSourceError,
                              code_to_point, iterate_orbit, itinerary_shift_check, rotation_bounds_from_code,
                              verify_shift_bound)
from annulus_rotation.horseshoe import HorseshoeSystem, _coded_exact, horseshoe_step


def test_parse_kinds():
    assert SymbolCode.parse("periodic:10").symbols(5).tolist() == [1, 0, 1, 0, 1]
    assert SymbolCode.parse("list:0110").length == 4
    b = SymbolCode.parse("blocks:0*2,1*3")
    assert b.symbols(5).tolist() == [0, 0, 1, 1, 1]
    e = SymbolCode.parse("blocks:0*1,1*2,...")
    assert e.symbols(7).tolist() == [0, 1, 1, 0, 0, 0, 0]
    for bad in ("periodic:", "periodic:12", "list:abc", "blocks:2*3", "blocks:0*1,...", "cyclic:01"):
        with pytest.raises(PreconditionError):
            SymbolCode.parse(bad)
    with pytest.raises(PreconditionError):
        SymbolCode.parse("list:01").symbols(3)


def test_fixed_and_two_cycle_points():
    # fixed points of the inverse branches: 0 for symbol 0, 3/4 for symbol 1
    assert _coded_exact([0] * 40) == pytest.approx(0.0, abs=1e-27)
    assert float(_coded_exact([1] * 40)) == pytest.approx(0.75, abs=1e-15)
    assert code_to_point(SymbolCode.periodic("1"), 40).x1 == pytest.approx(0.75, abs=1e-15)
    assert code_to_point(SymbolCode.periodic("0"), 40).x1 == pytest.approx(0.0, abs=1e-15)
    # the 10-cycle: y = 3/5 + y/25, so y = 5/8
    assert code_to_point(SymbolCode.periodic("10"), 40).x1 == pytest.approx(0.625, abs=1e-15)
    assert code_to_point(SymbolCode.periodic("01"), 40).x1 == pytest.approx(0.125, abs=1e-15)


def test_coding_is_monotone(rng):
    words = rng.integers(0, 2, (200, 12))
    keys = ["".join(map(str, w)) for w in words]
    x = np.array([code_to_point(SymbolCode.finite(w), 12).x1 for w in words])
    order = np.argsort(keys, kind="stable")
    assert np.all(np.diff(x[order]) >= 0)


def test_step_branches():
    p = horseshoe_step(horseshoe_step(code_to_point(SymbolCode.periodic("10"), 40), 1), 0)
    assert p.x1 == pytest.approx(1.625, abs=1e-12)
    with pytest.raises(PreconditionError):
        horseshoe_step(code_to_point(SymbolCode.periodic("10"), 40), 0)


def test_shift_bound_exact(rng):
    for _ in range(20):
        code = SymbolCode.finite(rng.integers(0, 2, 300))
        rep = verify_shift_bound(code, 200)
        assert rep.passed and rep.max_dev < 1.0
    with pytest.raises(NumericalError):
        verify_shift_bound(SymbolCode.periodic("10"), 100, depth=5)


def test_itinerary():
    code = SymbolCode.parse("blocks:0*3,1*5,...")
    rep = itinerary_shift_check(code, 60, 100)
    assert rep.passed and rep.mismatch_index == -1
    with pytest.raises(PreconditionError):
        itinerary_shift_check(code, 60, 61)


def test_rotation_of_periodic_codes():
    for word, rho in (("100", 1 / 3), ("1", 1.0), ("0", 0.0), ("10110", 0.6)):
        s = iterate_orbit(HorseshoeSystem(SymbolCode.periodic(word)), "x", 3000)
        assert s.cumulative[-1] / 3000 == pytest.approx(rho, abs=1.0 / 3000)
        assert s.min_r >= -2.0
    pr = rotation_bounds_from_code(SymbolCode.periodic("100"), 3000)
    assert pr.liminf_proxy == pytest.approx(1 / 3, abs=1e-3)
    assert pr.limsup_proxy == pytest.approx(1 / 3, abs=1e-3)


def test_doubling_blocks_have_a_gap():
    pr = rotation_bounds_from_code(SymbolCode.parse("blocks:0*4,1*16,0*64,..."), 20_000)
    assert pr.liminf_proxy < 0.25 and pr.limsup_proxy > 0.4


def test_orbit_matches_exact_rationals():
    code = SymbolCode.periodic("1101")
    x1, _ = HorseshoeSystem(code).orbit("x", 40)
    y = _coded_exact(code.symbols(80))
    s = 0
    for k in range(41):
        assert x1[k] == pytest.approx(float(s + y), abs=1e-12)
        if k < 40:
            a = code[k]
            y, s = 5 * y - 3 * a, s + a
    with pytest.raises(UnsupportedSourceError):
        iterate_orbit(HorseshoeSystem(code), "x", 5, "backward")
    assert isinstance(_coded_exact([1]), Fraction)
