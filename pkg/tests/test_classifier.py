import math

import pytest

from ruledfib.bundles import SymbolicCurveHandle as Handle
from ruledfib.classifier import (
    ClassificationInput,
    classify,
    cross_check,
    table_lookup,
)
from ruledfib.elliptic_curve import point_order
from ruledfib.errors import InvalidInput, UnknownOrder, UnreachableOverField
from ruledfib.fibers import FiberConfig, MultipleFiber, kodaira_coefficient, validate_config
from ruledfib.selftest import row_instances

ROWS = row_instances()


@pytest.mark.parametrize("row,inp", ROWS, ids=[f"{r}-{i}" for i, (r, _) in enumerate(ROWS)])
def test_rows(row, inp):
    res = classify(inp)
    assert res.row_id == row
    assert cross_check(inp)
    assert res.derivation_trace


def test_documented_examples(curves):
    r = classify(ClassificationInput(Handle(0, None, 1), "O+L"))
    assert (r.has_fibration, r.row_id, r.fibers) == (True, "i-1", ())
    r = classify(ClassificationInput(curves["F3_ordinary"], "E20"))
    assert r.row_id == "i-5" and r.fibers == ((1, 3, True),)
    r = classify(ClassificationInput(curves["F2_supersingular"], "EQ"))
    assert r.row_id == "ii-2" and r.fibers == ((1, 2, True),) and r.strange
    r = classify(ClassificationInput(curves["F2_ordinary"], "EQ"))
    assert r.row_id == "ii-3" and set(r.fibers) == {(1, 2, False), (0, 2, True)}
    E = curves["F5_cyclic4"]
    P = [Q for Q in E.points if point_order(Q) == 4][0]
    r = classify(ClassificationInput(E, "O+L", P))
    assert r.row_id == "i-2" and r.fibers == ((3, 4, False), (3, 4, False))
    r = classify(ClassificationInput(Handle(0), "E20"))
    assert (r.has_fibration, r.row_id) == (False, "i-4")


def _config(res):
    fibers = tuple(MultipleFiber(m, a, 1 if w else m, w) for a, m, w in res.fibers)
    return FiberConfig(-sum(w for _, _, w in res.fibers), fibers, res.p)


@pytest.mark.parametrize("row,inp", ROWS, ids=[f"{r}-{i}" for i, (r, _) in enumerate(ROWS)])
def test_output_invariants(row, inp):
    res = classify(inp)
    assert (res.fibers == ()) == (row == "i-1" or not res.has_fibration)
    assert res.strange == (row == "ii-2")
    if res.has_fibration:
        c = _config(res)
        assert validate_config(c) == []
        assert (kodaira_coefficient(c) % 2 == 0) == (res.e == 0)
        ms = [m for _, m, _ in res.fibers]
        is_mm = len(ms) == 2 and ms[0] == ms[1]
        if inp.shape == "O+L" and ms:
            assert is_mm
        if inp.shape == "E20":
            assert not is_mm


@pytest.mark.parametrize("p,ordinary", [(0, None), (3, True), (3, False), (5, True), (5, False),
                                        (7, False), (2, True), (2, False)])
def test_symbolic_sweep(p, ordinary):
    for o in (1, 2, 3, 4, 6, math.inf):
        if p and ordinary is False and isinstance(o, int) and o % p == 0:
            continue
        assert cross_check(ClassificationInput(Handle(p, ordinary, o), "O+L"))
    assert cross_check(ClassificationInput(Handle(p, ordinary), "E20"))
    assert cross_check(ClassificationInput(Handle(p, ordinary), "EQ"))


def test_every_point_of_a_curve(curves):
    for name in ("F5_square", "F2_ordinary", "F2_supersingular", "F4_ordinary", "F4_supersingular"):
        E = curves[name]
        for P in E.points:
            assert cross_check(ClassificationInput(E, "EQ", P))
            if E.field.q < 5:
                assert cross_check(ClassificationInput(E, "O+L", P))


def test_unreachable_over_field():
    inp = ClassificationInput(Handle(0), "EQ")
    with pytest.raises(UnreachableOverField) as exc:
        classify(inp, concrete=True)
    assert exc.value.result.row_id == "ii-1"
    with pytest.raises(UnreachableOverField):
        classify(ClassificationInput(Handle(5, True, math.inf), "O+L"), concrete=True)


def test_input_validation(curves):
    with pytest.raises(InvalidInput):
        ClassificationInput(curves["F5_square"], "E30")
    with pytest.raises(InvalidInput):
        ClassificationInput(curves["F5_square"], "EQ", curves["F3_ordinary"].points[0])
    with pytest.raises(UnknownOrder):
        classify(ClassificationInput(Handle(0), "O+L"))


def test_trace_names_rules_and_anchors():
    res = classify(ClassificationInput(Handle(2, True), "EQ"))
    rules = [t["rule"] for t in res.derivation_trace]
    assert "parity" in rules and "post-check" in rules
    assert any(r.startswith("placement") for r in rules)
    assert all(t["anchor"] for t in res.derivation_trace)


def test_table_is_independent_of_trace():
    inp = ClassificationInput(Handle(3, False), "E20")
    assert table_lookup(inp).key() == classify(inp).key()
