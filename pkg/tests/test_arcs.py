import numpy as np
import pytest

from annulus_rotation import (HalfIntegerError, HangingArc, IntersectionError, PreconditionError,
                              RigidRotation, arcs_disjoint, map_arc, nearest_integer, read_arc,
                              relative_winding, write_arc)
from annulus_rotation import arcgen
from annulus_rotation.arcs import compare_by_base, lead_line_extrema
from annulus_rotation.cover import CallableMap


def dense_winding(g, g2, factor=10):
    """Independent oracle: uniform fine sampling plus numpy unwrap, in half-turns."""
    n = factor * (len(g) + len(g2)) * 50
    t = np.union1d(np.linspace(0, 1, n), np.union1d(g.params, g2.params))
    d = g2.at(t) - g.at(t)
    ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    return (ang[-1] - ang[0]) / np.pi


def vertical(x, n=3, depth=-1.0):
    return HangingArc([(x, r) for r in np.linspace(0, depth, n)])


UNDER_G = HangingArc([(0, 0), (1, -1)])
UNDER_G2 = HangingArc([(2, 0), (2, -2), (-1, -2), (-1, -0.5)])


def test_arc_validation():
    with pytest.raises(PreconditionError):
        HangingArc([(0, 0)])
    with pytest.raises(PreconditionError):
        HangingArc([(0, -0.1), (0, -1)])
    with pytest.raises(PreconditionError):
        HangingArc([(0, 0), (1, 0)])
    with pytest.raises(PreconditionError):
        HangingArc([(0, 0), (0, -1)], params=[0, 0.5])
    with pytest.raises(IntersectionError):
        HangingArc([(0, 0), (0, -2), (1, -1), (-1, -1)])
    g = vertical(0.0)
    with pytest.raises(ValueError):
        g.vertices[0, 0] = 1.0


def test_disjointness_examples():
    assert arcs_disjoint(vertical(0), vertical(1)).disjoint
    cross = arcs_disjoint(HangingArc([(0, 0), (2, -1)]), HangingArc([(1, 0), (-1, -1)]))
    assert not cross.disjoint and not cross.disjoint_except_landing
    touch = arcs_disjoint(HangingArc([(0, 0), (0.5, -1)]), HangingArc([(1, 0), (0.5, -1)]))
    assert not touch.disjoint and touch.disjoint_except_landing


def test_parallel_winding_zero():
    res = relative_winding(vertical(0), vertical(1))
    assert res.w == 0.0 and res.nearest_int == 0


def test_under_configuration_minus_one():
    res = relative_winding(UNDER_G, UNDER_G2)
    assert res.nearest_int == -1
    assert res.w == pytest.approx(dense_winding(UNDER_G, UNDER_G2), abs=1e-9)


def test_extra_negative_loop_gives_minus_three():
    # g reaches its landing early; g2 then circles it clockwise once more (crossing g, never at matched t)
    g = HangingArc([(0, 0), (0.99, -0.99), (1, -1)], params=[0, 0.05, 1])
    g2 = HangingArc([(2, 0), (2, -0.2), (2, -2), (-1, -2), (-1, -0.5), (1, -0.2), (1.8, -1), (1, -1.8),
                     (0.2, -1), (-0.9, -0.6)],
                    params=[0, 0.05, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0])
    res = relative_winding(g, g2)
    assert res.nearest_int == -3
    assert res.w == pytest.approx(dense_winding(g, g2), abs=1e-9)


def test_winding_preconditions():
    with pytest.raises(PreconditionError):
        relative_winding(vertical(1), vertical(0))
    a = HangingArc([(0, 0), (1, -1)])
    b = HangingArc([(1, 0), (0, -1)])
    with pytest.raises(IntersectionError):
        relative_winding(a, b)


def test_shared_landing_allowed():
    a = HangingArc([(0, 0), (0.5, -1)])
    b = HangingArc([(1, 0), (0.5, -1)])
    res = relative_winding(a, b)
    assert res.nearest_int == 0


def test_nearest_integer():
    assert nearest_integer(0.9) == 1
    assert nearest_integer(-1.2) == -1
    assert nearest_integer(-1.6) == -2
    with pytest.raises(HalfIntegerError):
        nearest_integer(0.5)
    with pytest.raises(HalfIntegerError):
        nearest_integer(-2.5 + 1e-8)


def test_half_integer_winding_has_no_nearest_int():
    a = HangingArc([(0, 0), (0, -1)])
    b = HangingArc([(1, 0), (0, -0.5)])
    res = relative_winding(a, b)
    assert res.w == pytest.approx(0.5)
    assert res.nearest_int is None


def test_lead_line_extrema():
    assert lead_line_extrema(vertical(0.3)) == (0.3, 0.3)
    g = HangingArc([(0, 0), (2, -1), (-1, -2), (1, -3)])
    assert lead_line_extrema(g) == (-1, 2)
    lo, hi = lead_line_extrema(g.deck(4))
    assert (lo, hi) == (3, 6)


def test_compare_by_base():
    assert compare_by_base(vertical(0), vertical(1)) == -1
    assert compare_by_base(vertical(1), vertical(0)) == 1
    g = UNDER_G
    assert compare_by_base(g, g.deck(1)) == -1
    with pytest.raises(IntersectionError):
        compare_by_base(HangingArc([(0, 0), (2, -1)]), HangingArc([(1, 0), (-1, -1)]))


def test_reparameterization_invariance(rng):
    for _ in range(20):
        g, g2 = arcgen.passing_pair(rng, 1)
        w = relative_winding(g, g2).w
        a = rng.uniform(0.2, 3.0)
        w2 = relative_winding(g.reparameterized(lambda t: t ** a), g2.reparameterized(lambda t: t ** a)).w
        w3 = relative_winding(g.resampled(rng.uniform(0, 1, 30)), g2).w
        assert abs(w2 - w) <= 1e-9 and abs(w3 - w) <= 1e-9


def test_deck_equivariance(rng):
    for _ in range(20):
        g, g2 = arcgen.passing_pair(rng, 2)
        k = int(rng.integers(-5, 6))
        assert relative_winding(g.deck(k), g2.deck(k)).w == pytest.approx(relative_winding(g, g2).w, abs=1e-12)


def test_passing_pair_kinds(rng):
    for _ in range(100):
        g, g2 = arcgen.passing_pair(rng, 1)
        assert arcs_disjoint(g, g2).disjoint and g.is_simple() and g2.is_simple()
        assert g2.landing.x1 < g.vertices[:, 0].min()
        assert relative_winding(g, g2).nearest_int == -1
        g, g2 = arcgen.passing_pair(rng, 2)
        assert g2.vertices[:, 0].max() < g.landing.x1
        assert relative_winding(g, g2).nearest_int == 1


def test_map_arc_identity_and_rotation():
    g = UNDER_G2
    ident = CallableMap(lambda x, r: (x, r))
    img = map_arc(ident, g, seg_tol=10.0)
    np.testing.assert_array_equal(img.vertices, g.vertices)
    img = map_arc(RigidRotation(0.3), g, seg_tol=10.0)
    np.testing.assert_allclose(img.vertices, g.vertices + [0.3, 0.0])


def _polyline_distance(v, pts):
    a, b = v[:-1], v[1:]
    seg = b - a
    L2 = np.maximum(np.einsum("ij,ij->i", seg, seg), 1e-300)
    out = []
    for p in pts:
        s = np.clip(np.einsum("ij,ij->i", p - a, seg) / L2, 0.0, 1.0)
        q = a + s[:, None] * seg
        out.append(np.min(np.hypot(*(q - p).T)))
    return np.array(out)


def test_map_arc_transverse_segment(transverse):
    g = HangingArc([(0.2, 0.0), (0.2, -1.7)])
    img = map_arc(transverse.source, g, seg_tol=0.05)
    assert np.hypot(*np.diff(img.vertices, axis=0).T).max() <= 0.05
    assert img.is_simple()
    # oracle: images of a 10x finer uniform subdivision of g lie within seg_tol of the polyline
    t = np.linspace(0, 1, 10 * len(img))
    fx, fr = transverse.source.forward(*g.at(t).T)
    d = _polyline_distance(img.vertices, np.column_stack([fx, fr]))
    assert d.max() <= 0.05


def test_map_arc_needs_boundary():
    drop = CallableMap(lambda x, r: (x, r - 0.1))
    with pytest.raises(PreconditionError):
        map_arc(drop, vertical(0))


def test_arc_file_round_trip(tmp_path, rng):
    g, _ = arcgen.passing_pair(rng, 1)
    path = tmp_path / "g.arc"
    write_arc(path, g)
    h = read_arc(path)
    np.testing.assert_array_equal(h.vertices, g.vertices)
    np.testing.assert_array_equal(h.params, g.params)
    bad = tmp_path / "bad.arc"
    bad.write_text("nope\n0 0 0\n")
    with pytest.raises(PreconditionError):
        read_arc(bad)
