from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ruledfib.errors import MixedSurfaces, OutOfScope
from ruledfib.lattice import (
    SurfaceClass,
    canonical_class,
    class_ratio,
    fiber_reduction_class,
    intersect,
    minus_K_nef,
    normalized_bundle_menu,
    pullback_class,
    reduction_pullback_ratio,
    ruling_fiber,
    section,
)


@pytest.mark.parametrize("e", [-1, 0, 1, 2])
def test_basic_intersections(e):
    C0, F, K = section(e), ruling_fiber(e), canonical_class(e)
    assert intersect(C0, C0) == -e
    assert intersect(C0, F) == 1
    assert intersect(F, F) == 0
    assert intersect(K, K) == 0
    # adjunction on C0 and F: genus one and genus zero
    assert intersect(C0, C0) + intersect(K, C0) == 0
    assert intersect(F, F) + intersect(K, F) == -2


def test_fiber_reduction():
    assert fiber_reduction_class(0) == SurfaceClass(1, 0, 0)
    D = fiber_reduction_class(-1)
    assert intersect(D, D) == 0
    assert intersect(D, ruling_fiber(-1)) == 2
    assert intersect(canonical_class(-1) + D, D) == 0
    with pytest.raises(OutOfScope):
        fiber_reduction_class(1)


def test_two_dd_ratio():
    assert reduction_pullback_ratio(-1, 0, 2) == 2
    assert reduction_pullback_ratio(0, 0, 3) == 1
    assert reduction_pullback_ratio(-1, -1, 3) == 1
    with pytest.raises(OutOfScope):
        reduction_pullback_ratio(-1, -1, 4)


def test_menu():
    assert [s["shape"] for s in normalized_bundle_menu(0)] == ["O+L", "E20"]
    assert [s["shape"] for s in normalized_bundle_menu(-1)] == ["EQ"]
    with pytest.raises(OutOfScope):
        normalized_bundle_menu(1)
    assert minus_K_nef(0) and minus_K_nef(-1) and not minus_K_nef(1)


def test_mixed_surfaces():
    with pytest.raises(MixedSurfaces):
        intersect(section(0), section(-1))


def test_class_ratio():
    assert class_ratio(SurfaceClass(4, -2, -1), SurfaceClass(2, -1, -1)) == Fraction(2)
    assert class_ratio(SurfaceClass(1, 1, 0), SurfaceClass(1, 0, 0)) is None


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
       st.sampled_from([(0, 0), (-1, 0), (-1, -1), (0, -1)]), st.integers(1, 6))
def test_pullback_scales_intersections(a, b, c, d, es, n):
    e, e_up = es
    if (n * (-e) + e_up) % 2:
        return
    x, y = SurfaceClass(a, b, e), SurfaceClass(c, d, e)
    px, py = pullback_class(x, n, e_up), pullback_class(y, n, e_up)
    assert intersect(px, py) == n * intersect(x, y)


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6),
       st.sampled_from([0, -1]))
def test_intersection_symmetric_bilinear(a, b, c, d, e):
    x, y = SurfaceClass(a, b, e), SurfaceClass(c, d, e)
    assert intersect(x, y) == intersect(y, x)
    assert intersect(x + y, y) == intersect(x, y) + intersect(y, y)
