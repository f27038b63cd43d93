import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ruledfib.elliptic_curve import (
    curve_from_json,
    find_point_of_order,
    make_curve,
    point_order,
)
from ruledfib.errors import (
    CharZero,
    IrrationalKernel,
    MixedCurves,
    NeedsFieldExtension,
    OrderOne,
    SingularCurve,
)
from ruledfib.finite_field import make_field
from ruledfib.isogeny import (
    _rational_preimage_divisor,
    compose,
    dual_isogeny,
    frobenius_isogeny,
    identity_isogeny,
    kernel_divisor,
    preimage_divisor,
    velu_quotient,
)
from ruledfib.selftest import hasse_invariant_zero


def brute_count(E):
    """Affine solutions by double loop, plus the point at infinity."""
    F = E.field
    n = 1
    for x, y in itertools.product(list(F.elements()), repeat=2):
        lhs = y * y + E.a1 * x * y + E.a3 * y
        rhs = x * x * x + E.a2 * x * x + E.a4 * x + E.a6
        n += lhs == rhs
    return n


def test_point_count_matches_brute_force(curves):
    for E in curves.values():
        assert E.order == brute_count(E)
        assert len(E.points) == E.order


def test_singular_rejected():
    with pytest.raises(SingularCurve):
        make_curve(make_field(5))


def test_supersingular_flags(curves):
    assert curves["F2_supersingular"].supersingular
    assert not curves["F2_ordinary"].supersingular
    assert curves["F5_supersingular"].supersingular
    assert curves["F3_supersingular"].supersingular
    for E in curves.values():
        assert E.supersingular == (E.trace % E.p == 0)
        if E.p == 2 or (E.a1 == E.field(0) and E.a3 == E.field(0)):
            assert E.supersingular == hasse_invariant_zero(E)


def test_group_structure_orders(curves):
    E = curves["F7_cyclic12"]
    assert E.group_structure() == (12,)
    assert curves["F5_square"].group_structure() == (2, 2)


def test_json_roundtrip(curves):
    for E in curves.values():
        assert curve_from_json(E.to_json()) == E


def test_find_point_over_extension(curves):
    E = curves["F5_square"]
    Ej, P = find_point_of_order(E, 4)
    assert Ej.field.k == 2 and point_order(P) == 4
    with pytest.raises(NeedsFieldExtension):
        find_point_of_order(E, 3)


def test_velu_quotient_is_homomorphism(curves):
    for name in ("F5_square", "F5_cyclic4", "F7_cyclic12", "F2_ordinary", "F4_ordinary"):
        E = curves[name]
        for P in E.points:
            if P.is_infinity:
                continue
            phi = velu_quotient(E, P)
            assert phi.degree == point_order(P)
            for A, B in itertools.islice(itertools.product(E.points, repeat=2), 60):
                assert phi(A + B) == phi(A) + phi(B)
            assert all(phi(K).is_infinity for K in phi.kernel_points)
            assert phi.codomain.order == E.order


def test_velu_self_quotient_y2_x3_x():
    # the quotient of y^2 = x^3 + x over F_5 by (0, 0) is the same curve
    E = make_curve(make_field(5), a4=1)
    phi = velu_quotient(E, E.point(E.field(0), E.field(0)))
    assert phi.codomain == E


def test_dual_composition_is_multiplication(curves):
    for name in ("F5_cyclic4", "F7_cyclic12", "F3_ordinary"):
        E = curves[name]
        for P in E.points[1:4]:
            phi = velu_quotient(E, P)
            psi = dual_isogeny(phi)
            n = phi.degree
            for R in E.points:
                assert psi(phi(R)) == n * R
            comp = compose(psi, phi)
            assert comp.degree == n * n


def test_frobenius(curves):
    for name in ("F2_ordinary", "F2_supersingular", "F4_ordinary", "F3_ordinary"):
        E = curves[name]
        Fr = frobenius_isogeny(E)
        assert Fr.degree == E.p and not Fr.separable
        assert Fr.dual_separable == E.ordinary
        for P in E.points:
            assert Fr.codomain.contains(Fr(P).x, Fr(P).y) if not P.is_infinity else True


def test_isogeny_errors(curves):
    E = curves["F5_square"]
    with pytest.raises(OrderOne):
        velu_quotient(E, E.infinity)
    Ej, P = find_point_of_order(E, 4)
    with pytest.raises(IrrationalKernel):
        velu_quotient(E, P)
    with pytest.raises(MixedCurves):
        identity_isogeny(E)(curves["F5_cyclic4"].infinity)


def test_kernel_divisor_degree(curves):
    E = curves["F7_cyclic12"]
    for P in E.points[1:5]:
        phi = velu_quotient(E, P)
        assert sum(m for _, m in kernel_divisor(phi)) == phi.degree
    Fr = frobenius_isogeny(curves["F2_ordinary"])
    assert kernel_divisor(Fr) == [(Fr.domain.infinity, 2)]


def test_preimage_needs_extension(curves):
    E = curves["F5_cyclic4"]
    P = [Q for Q in E.points if point_order(Q) == 2][0]
    psi = dual_isogeny(velu_quotient(E, P))
    irrational = [R for R in psi.codomain.points
                  if sum(m for _, m in _rational_preimage_divisor(psi, R)) != 2]
    if irrational:
        with pytest.raises(NeedsFieldExtension) as exc:
            preimage_divisor(psi, irrational[0])
        assert exc.value.degree is None or exc.value.degree >= 2


SMALL = [(2, (1, 1, 0, 0, 1)), (2, (0, 0, 1, 0, 0)), (3, (0, 0, 0, 2, 1)), (5, (0, 0, 0, 1, 2)),
         (7, (0, 0, 0, 3, 1)), (11, (0, 0, 0, 1, 1)), (13, (0, 0, 0, 2, 5))]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_group_axioms(spec, data):
    p, coeffs = spec
    E = make_curve(make_field(p), *coeffs)
    idx = st.integers(0, len(E.points) - 1)
    P, Q, R = (E.points[data.draw(idx)] for _ in range(3))
    assert (P + Q) + R == P + (Q + R)
    assert P + Q == Q + P
    assert P + E.infinity == P
    assert (P + (-P)).is_infinity
    assert E.order * P == E.infinity


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.data())
def test_hasse_bound_random_curves(p, data):
    coeffs = [data.draw(st.integers(0, p - 1)) for _ in range(5)]
    try:
        E = make_curve(make_field(p), *coeffs)
    except SingularCurve:
        return
    assert E.trace**2 <= 4 * p


def test_char_zero_frobenius():
    class Fake:
        p = 0
    with pytest.raises(CharZero):
        frobenius_isogeny(Fake())
