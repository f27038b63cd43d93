import math
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from ruledfib import bundles as bd
from ruledfib.bundles import (
    O,
    AtiyahTriv,
    ExtQ,
    SymbolicClass,
    SymbolicCurveHandle,
    SymbolicIsogeny,
    TensorLine,
)
from ruledfib.elliptic_curve import find_point_of_order, point_order
from ruledfib.errors import (
    InfiniteOrder,
    InvalidInput,
    RuleHypothesisUnmet,
    UnknownOrder,
    UnsupportedShape,
)
from ruledfib.isogeny import dual_isogeny, frobenius_isogeny, velu_quotient


def lines_of(B):
    return [s for s in bd.summands(B) if isinstance(s, bd.LineClass)]


def test_atiyah_cohomology():
    assert bd.cohomology(AtiyahTriv(2)) == (1, 1)
    assert bd.cohomology(bd.direct_sum(O, O)) == (2, 2)
    assert bd.rank_deg(ExtQ(None)) == (2, 1)
    assert bd.cohomology(ExtQ(None)) == (1, 0)


def test_line_cohomology(curves):
    E = curves["F7_cyclic12"]
    P = E.points[1]
    assert bd.cohomology(bd.line(P)) == (0, 0)
    assert bd.cohomology(bd.line(None, 3)) == (3, 0)
    assert bd.cohomology(bd.line(P, -2)) == (0, 2)


def test_sym_power_decomposable(curves):
    E = curves["F7_cyclic12"]
    P = [Q for Q in E.points if point_order(Q) == 3][0]
    B = bd.direct_sum(O, bd.line(P))
    assert [bd.cohomology(bd.sym_power(B, n))[0] for n in range(5)] == [1, 1, 1, 2, 2]
    assert bd.rank_deg(bd.sym_power(B, 4)) == (5, 0)


def test_sym_power_atiyah():
    for p in (2, 3, 5, 7):
        seq = [bd.cohomology(bd.sym_power(AtiyahTriv(2), n, p))[0] for n in range(p + 1)]
        assert seq == [1] * p + [2]
    assert bd.sym_power(AtiyahTriv(2), 5, 5) == bd.direct_sum(O, AtiyahTriv(5))
    assert bd.sym_power(AtiyahTriv(2), 4, 0) == AtiyahTriv(5)


def test_dual_and_det(curves):
    E = curves["F5_cyclic4"]
    Q = E.points[2]
    D = bd.dual(ExtQ(Q))
    assert bd.rank_deg(D) == (2, -1)
    assert bd.det(ExtQ(Q)) == bd.line(Q, 1)
    assert bd.dual(bd.dual(ExtQ(Q))) == bd.normalize(ExtQ(Q))


def test_pullback_separable_degree_two(curves):
    for name in ("F3_ordinary", "F5_square"):
        E = curves[name]
        Ej, T = find_point_of_order(E, 2)
        phi = dual_isogeny(velu_quotient(Ej, T))
        Q = Ej.points[0]
        pulled, used = bd.pullback_extending(ExtQ(Q.embed(phi.codomain)), phi)
        a, b = lines_of(pulled)
        F = used.domain
        pa = a.point if a.point is not None else F.infinity
        pb = b.point if b.point is not None else F.infinity
        assert point_order(pa - pb) == 2
        assert bd.rank_deg(pulled) == (2, 2)


def test_pullback_frobenius_char_two(curves):
    for name in ("F2_ordinary", "F2_supersingular"):
        E = curves[name]
        phi = frobenius_isogeny(E.frobenius_twist(-1))
        pulled, _ = bd.pullback_extending(ExtQ(E.infinity), phi)
        N = bd.normalize(pulled)
        assert isinstance(N, TensorLine) and N.inner == AtiyahTriv(2)
        assert bd.rank_deg(N) == (2, 2)


def test_atiyah_trivializes_along_verschiebung(curves):
    for name in ("F2_ordinary", "F3_ordinary", "F5_supersingular"):
        E = curves[name]
        pulled, _ = bd.pullback_extending(AtiyahTriv(2), dual_isogeny(frobenius_isogeny(E)))
        assert pulled == bd.direct_sum(O, O)


def test_atiyah_rule_needs_inseparable_dual(curves):
    E = curves["F5_square"]
    phi = velu_quotient(E, E.points[1])
    with pytest.raises(RuleHypothesisUnmet):
        bd.pullback(AtiyahTriv(2), phi)


def test_pushforward_velu():
    from ruledfib.elliptic_curve import make_curve
    from ruledfib.finite_field import make_field

    E = make_curve(make_field(5), a4=1)
    T = E.point(E.field(0), E.field(0))
    phi = velu_quotient(E, T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        push = bd.pushforward_structure(phi)
    assert bd.rank_deg(push) == (2, 0)
    assert bd.cohomology(push)[0] == 1


def test_pushforward_frobenius_dual(curves):
    E = curves["F3_ordinary"]
    push = bd.pushforward_structure(dual_isogeny(frobenius_isogeny(E)))
    assert push == AtiyahTriv(3)


def test_kill_torsion_line(curves):
    E = curves["F5_cyclic4"]
    for P in E.points:
        phi = bd.kill_torsion_line(E, P)
        assert phi.degree == point_order(P)
        info = bd.verify_killed(phi, P)
        assert info["method"] in ("divisor", "dual-evaluation")


def test_projective_normal_form(curves):
    E = curves["F7_cyclic12"]
    P, Q = E.points[1], E.points[2]
    B, e = bd.projective_normal_form(bd.direct_sum(bd.line(P, 1), bd.line(Q, 1)))
    assert e == 0 and len(lines_of(B)) == 2
    B, e = bd.projective_normal_form(bd.twist(ExtQ(Q), bd.line(P, 1)))
    assert e == -1 and isinstance(B, ExtQ)


def test_symbolic_classes():
    a = SymbolicClass.named("L", 4)
    assert (4 * a).is_infinity
    assert (2 * a).order() == 2
    assert (a + a - 2 * a).is_infinity
    with pytest.raises(UnknownOrder):
        SymbolicClass.named("M", None).order()
    assert SymbolicClass.named("L", math.inf).order() == math.inf


def test_symbolic_pullback_kills():
    h = SymbolicCurveHandle(0, None, 3)
    B = bd.direct_sum(O, bd.line(h.line_class()))
    phi = SymbolicIsogeny(3, 0, separable=True, dual_separable=True, kind="kill-line", kills=("L",))
    assert bd.pullback(B, phi) == bd.direct_sum(O, O)


def test_symbolic_handle_validation():
    with pytest.raises(InvalidInput):
        SymbolicCurveHandle(3)
    with pytest.raises(InvalidInput):
        SymbolicCurveHandle(3, False, 6)
    with pytest.raises(InvalidInput):
        SymbolicCurveHandle(0, None, 0)


def test_infinite_order_not_killed(curves):
    with pytest.raises(InfiniteOrder):
        bd.kill_torsion_line(curves["F5_square"], SymbolicClass.named("L", math.inf))


def test_parse_bundle(curves):
    E = curves["F5_cyclic4"]
    pts = {"P": E.points[1]}
    assert bd.parse_bundle("E20") == AtiyahTriv(2)
    assert bd.parse_bundle("O+L(P)", pts) == bd.direct_sum(O, bd.line(E.points[1]))
    assert bd.parse_bundle("EQ(P)", pts) == ExtQ(E.points[1])
    with pytest.raises(UnsupportedShape):
        bd.parse_bundle("E30")
    with pytest.raises(KeyError):
        bd.parse_bundle("EQ(R)", pts)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 11), st.integers(-4, 4), st.integers(0, 6),
       st.sampled_from(["line", "sum", "atiyah", "ext", "sym"]))
def test_riemann_roch(i, shift, n, kind):
    from ruledfib.selftest import test_curves

    E = test_curves()["F7_cyclic12"]
    P = E.points[i]
    B = {
        "line": bd.line(P, shift),
        "sum": bd.direct_sum(bd.line(None, shift), bd.line(P, -shift)),
        "atiyah": bd.twist(AtiyahTriv(2), bd.line(P, shift)),
        "ext": bd.twist(ExtQ(P), bd.line(None, shift)),
        "sym": bd.sym_power(bd.direct_sum(O, bd.line(P)), n),
    }[kind]
    h0, h1 = bd.cohomology(B)
    assert h0 - h1 == bd.rank_deg(B)[1]
    assert min(h0, h1) >= 0
