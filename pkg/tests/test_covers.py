import pytest

from ruledfib.bundles import SymbolicCurveHandle as Handle
from ruledfib.covers import (
    BasePoint,
    CoverDiagram,
    Preimage,
    PsiData,
    build_resolution,
    check_accounting,
    check_diagram,
    compose_tower,
    fiber_class_identity,
    hurwitz_check,
    psi_from_points,
    stage_list,
    wildness_transfer,
)
from ruledfib.errors import InseparableInput, UnsupportedCase
from ruledfib.selftest import EXPECTED_WILD, diagram_instances


@pytest.mark.parametrize("case,data", diagram_instances(),
                         ids=[f"{c}-{i}" for i, (c, _) in enumerate(diagram_instances())])
def test_resolution_clauses(case, data):
    d = build_resolution(case, data)
    clauses = check_diagram(d, EXPECTED_WILD[case])
    assert clauses and all(clauses.values()), {k: v for k, v in clauses.items() if not v}
    assert d.top_row_trivial


def test_two_stage_cases(curves):
    for case, E in [("ii-1", curves["F3_ordinary"]), ("ii-2", curves["F2_supersingular"]),
                    ("ii-3", curves["F2_ordinary"])]:
        d = build_resolution(case, E)
        assert len(stage_list(d)) == 2
        assert d.e_lower == -1 and d.e_upper == 0
        assert fiber_class_identity(stage_list(d)[0])


def test_ii3_pullback_has_order_two_difference(curves):
    d = build_resolution("ii-3", curves["F4_ordinary"])
    assert stage_list(d)[0].bundle_check["order_Q1_minus_Q2"] == 2


def test_unsupported_cases(curves):
    for case in ("i-1", "i-3", "i-4"):
        with pytest.raises(UnsupportedCase):
            build_resolution(case, curves["F5_square"])
    with pytest.raises(UnsupportedCase):
        build_resolution("ii-1", curves["F2_ordinary"])
    with pytest.raises(UnsupportedCase):
        build_resolution("ii-3", curves["F2_supersingular"])
    with pytest.raises(UnsupportedCase):
        build_resolution("i-5", Handle(0))


def test_hurwitz_degree_two():
    assert hurwitz_check({"degree": 2, "p": 3, "branch_points": [
        {"label": "a", "ramification": [[2, 1]]}, {"label": "b", "ramification": [[2, 1]]}]})
    assert hurwitz_check({"degree": 2, "p": 2, "branch_points": [
        {"label": "a", "ramification": [[2, 2]]}]})
    assert not hurwitz_check({"degree": 2, "p": 2, "branch_points": [
        {"label": "a", "ramification": [[2, 1]]}, {"label": "b", "ramification": [[2, 1]]}]})
    assert not hurwitz_check({"degree": 2, "p": 3, "branch_points": [
        {"label": "a", "ramification": [[2, 1]]}]})
    with pytest.raises(InseparableInput):
        hurwitz_check(PsiData(2, 2, False))


def test_hurwitz_tame_degree_three():
    pts = [BasePoint(f"Q{i}", 1, (Preimage("x", 3),)) for i in range(2)]
    assert hurwitz_check(psi_from_points(pts, 3, 5))
    assert not hurwitz_check(psi_from_points(pts[:1], 3, 5))


def test_accounting_violations():
    bad = CoverDiagram("x", 3, 2, True, (
        BasePoint("Q", 3, (Preimage("Q'", 1, 2), Preimage("Q''", 1, 2))),), 0, 0, 3, 2)
    assert check_accounting(bad)
    lone = CoverDiagram("x", 3, 2, True, (BasePoint("G", 1, (Preimage("G'", 2, 2),)),), 0, 0, 1, 2)
    assert any("m = 1 below" in v for v in check_accounting(lone))


def test_wildness_rules():
    unram = CoverDiagram("x", 2, 2, True, (BasePoint("Q", 2, (
        Preimage("a", 1, 2, False, "iso"), Preimage("b", 1, 2, False, "iso"))),), -1, 0, 2, 2)
    assert wildness_transfer(unram, "Q") == "tame"
    branched = CoverDiagram("x", 2, 2, True, (BasePoint("Q", 2, (
        Preimage("a", 2, 1, False, "separable"),)),), -1, 0, 2, 1)
    assert wildness_transfer(branched, "Q") == "wild"
    odd = CoverDiagram("x", 3, 2, True, (BasePoint("Q", 2, (Preimage("a", 2, 1),)),), -1, 0, 2, 1)
    assert wildness_transfer(odd, "Q") == "tame"
    unknown = CoverDiagram("x", 2, 2, True, (BasePoint("Q", 2, (Preimage("a", 2, 1),)),), -1, 0, 2, 1)
    assert wildness_transfer(unknown, "Q") == "undetermined"


def test_compose_tower_degrees(curves):
    d = build_resolution("ii-1", curves["F5_square"])
    lower, upper = stage_list(d)
    again = compose_tower(lower, upper, "ii-1")
    assert again.degree == lower.degree * upper.degree == 4
    assert again.top_row_trivial


def test_diagram_json_is_stable(curves):
    import json

    a = json.dumps(build_resolution("ii-3", curves["F2_ordinary"]).to_json(), sort_keys=True, default=str)
    b = json.dumps(build_resolution("ii-3", curves["F2_ordinary"]).to_json(), sort_keys=True, default=str)
    assert a == b
