from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinpowder.exact import (
    ExactPoint,
    Isometry,
    NonCanonicalDistance,
    OddScaleError,
    RadiusKey,
    Triangle,
    exact_cover_check,
    intersection_area2,
    polygon_area2,
    squared_distance,
)
from pinpowder.substitution import REF_TRIANGLE, derive_dissection


def test_identity_compose():
    e = Isometry.identity()
    assert e.compose(e) == e


def test_compose_rational_rotation_squares():
    # multiplication by (3+4i)/5, squared, is (-7+24i)/25
    r = Isometry.make((3, -4, 4, 3), scale_exp=2)
    rr = r.compose(r)
    assert rr.linear == (-7, -24, 24, -7)
    assert rr.scale_exp == 4
    assert rr.is_isometry()


def test_compose_inverse_of_dissection_children():
    for h in derive_dissection().children:
        prod = h.compose(h.inverse())
        assert prod.linear == (1, 0, 0, 1)
        assert prod.tx == 0 and prod.ty == 0


def test_compose_associative_on_children():
    hs = derive_dissection().children
    for a in hs:
        for b in hs:
            for c in hs:
                assert a.compose(b).compose(c) == a.compose(b.compose(c))


def test_apply_identity():
    p = ExactPoint.of(Fraction(2, 5), Fraction(1, 5))
    assert Isometry.identity().apply(p) == p


def test_apply_rotation_scale2():
    g = Isometry.make((3, -4, 4, 3), scale_exp=2)
    img = g.apply(ExactPoint.of(1, 0))
    assert img == ExactPoint.of(Fraction(3, 5), Fraction(4, 5))


def test_apply_inflation_frame_similarity():
    # sqrt(5) R_{-alpha} declared with scale_exp 0 acts as the plain matrix
    m = Isometry.make((2, 1, -1, 2), scale_exp=0)
    img = m.apply(ExactPoint.of(Fraction(-1, 2), Fraction(-1, 2)))
    assert img == ExactPoint.of(Fraction(-3, 2), Fraction(-1, 2))


def test_apply_odd_scale_rejected():
    g = Isometry.make((2, -1, 1, 2), scale_exp=1)
    with pytest.raises(OddScaleError):
        g.apply(ExactPoint.of(1, 0))


def test_compose_odd_scale_translation_rejected():
    g = Isometry.make((2, -1, 1, 2), scale_exp=1)
    h = Isometry.make((1, 0, 0, 1), scale_exp=0, translation=(1, 0))
    with pytest.raises(OddScaleError):
        g.compose(h)
    # zero translation on the right composes fine
    assert g.compose(Isometry.identity()).linear == (2, -1, 1, 2)


def test_canonical_reduction():
    g = Isometry.make((5, 0, 0, 5), scale_exp=2)
    assert g.canonical() == Isometry.identity()


def test_orthogonality_invariant():
    for h in derive_dissection().children:
        assert h.similarity_exp() == 0
        assert h.is_isometry()


def test_squared_distance_examples():
    o = ExactPoint.of(0, 0)
    assert squared_distance(o, o) == RadiusKey(0, 0)
    kite = ExactPoint.of(Fraction(2, 5), Fraction(1, 5))
    assert squared_distance(o, kite) == RadiusKey(1, 1)
    assert squared_distance(o, ExactPoint.of(0, 1)) == RadiusKey(1, 0)


def test_squared_distance_symmetry_zero():
    a = ExactPoint.of(Fraction(3, 2), Fraction(-1, 5))
    b = ExactPoint.of(Fraction(1, 2), Fraction(4, 5))
    assert squared_distance(a, b) == squared_distance(b, a)
    assert squared_distance(a, a) == RadiusKey(0, 0)


def test_squared_distance_rejects_bad_denominator():
    with pytest.raises(NonCanonicalDistance):
        squared_distance(ExactPoint.of(0, 0), ExactPoint.of(Fraction(1, 3), 0))
    # both coordinates odd half-integers leave a denominator 2
    with pytest.raises(NonCanonicalDistance):
        squared_distance(ExactPoint.of(0, 0), ExactPoint.of(Fraction(1, 2), Fraction(1, 2)))


def test_radius_key_canonical():
    assert RadiusKey.make(50, 1) == RadiusKey(10, 0)
    assert RadiusKey.make(125, 3) == RadiusKey(1, 0)
    assert RadiusKey.make(49, 2) == RadiusKey(49, 2)
    assert RadiusKey.from_squared(Fraction(1, 5)) == RadiusKey(1, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=8))
def test_radius_key_idempotent_and_order(value, ell):
    key = RadiusKey.make(value, ell)
    again = RadiusKey.make(key.p2q2, key.ell)
    assert key == again
    assert key.as_fraction() == Fraction(value, 5**ell)


@settings(max_examples=100, deadline=None)
@given(
    st.tuples(st.integers(0, 500), st.integers(0, 4)),
    st.tuples(st.integers(0, 500), st.integers(0, 4)),
)
def test_radius_key_order_matches_fractions(a, b):
    ka, kb = RadiusKey.make(*a), RadiusKey.make(*b)
    assert (ka < kb) == (ka.as_fraction() < kb.as_fraction())


def test_polygon_clip_area():
    square = [(Fraction(0), Fraction(0)), (Fraction(2), Fraction(0)),
              (Fraction(2), Fraction(2)), (Fraction(0), Fraction(2))]
    shifted = [(x + 1, y + 1) for x, y in square]
    assert intersection_area2(square, shifted) == 2  # area 1, doubled
    disjoint = [(x + 5, y) for x, y in square]
    assert intersection_area2(square, disjoint) == 0
    touching = [(x + 2, y) for x, y in square]
    assert intersection_area2(square, touching) == 0


def test_exact_cover_check_failures():
    parent = REF_TRIANGLE
    wrong_scale = Triangle.of((0, 0), (2, 0), (0, 4))
    rep = exact_cover_check(parent, [wrong_scale])
    assert not rep and any("area" in f or "contained" in f for f in rep.failures)
    overlapping = exact_cover_check(
        Triangle.of((-3, -1), (1, -3), (1, 7)),
        [REF_TRIANGLE] * 5,
    )
    assert not overlapping
    assert any("overlap" in f for f in overlapping.failures)


def test_exact_cover_check_dissection():
    dis = derive_dissection()
    assert dis.certificate.ok


def test_triangle_prototile_invariants():
    assert not REF_TRIANGLE.is_degenerate()
    assert REF_TRIANGLE.side_lengths_squared() == [1, 4, 5]
