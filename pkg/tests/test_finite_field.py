import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ruledfib.errors import DegreeOutOfRange, DivisionByZero, MixedFields, NonPrime
from ruledfib.finite_field import (
    element_from_json,
    element_to_json,
    embed,
    extension,
    is_irreducible,
    make_field,
)

FIELDS = [(2, 1), (2, 3), (3, 2), (5, 1), (7, 2), (2, 4)]


def test_modulus_irreducible_by_sympy():
    for p, k in FIELDS:
        F = make_field(p, k)
        x = sympy.symbols("x")
        poly = sympy.Poly(list(reversed(F.modulus)), x, modulus=p)
        assert poly.is_irreducible
        assert len(F.modulus) == k + 1


def test_irreducibility_matches_sympy_degree_three():
    x = sympy.symbols("x")
    for p in (2, 3):
        for a in range(p):
            for b in range(p):
                for c in range(p):
                    coeffs = [c, b, a, 1]
                    ours = is_irreducible(coeffs, p)
                    theirs = sympy.Poly(list(reversed(coeffs)), x, modulus=p).is_irreducible
                    assert ours == theirs


def test_errors():
    with pytest.raises(NonPrime):
        make_field(4)
    with pytest.raises(DegreeOutOfRange):
        make_field(2, 0)
    with pytest.raises(DegreeOutOfRange):
        make_field(2, 30)
    F = make_field(5)
    with pytest.raises(DivisionByZero):
        F(0).inverse()
    with pytest.raises(MixedFields):
        F(1) + make_field(7)(1)


def test_env_cap(monkeypatch):
    monkeypatch.setenv("RULEDFIB_MAX_FIELD", "100")
    with pytest.raises(DegreeOutOfRange):
        make_field(11, 2)


def test_multiplicative_group_order():
    F = make_field(3, 2)
    for a in F.elements():
        if a:
            assert a ** (F.q - 1) == F.one


def test_json_roundtrip():
    F = make_field(7, 2)
    for a in F.elements():
        assert element_from_json(F, element_to_json(a)) == a


def test_embedding_is_a_homomorphism():
    small = make_field(2, 2)
    big = extension(small, 2)
    for a in small.elements():
        for b in small.elements():
            assert embed(a * b, big) == embed(a, big) * embed(b, big)
            assert embed(a + b, big) == embed(a, big) + embed(b, big)


field_and_elems = st.sampled_from(FIELDS).flatmap(
    lambda pk: st.tuples(
        st.just(pk),
        *[st.lists(st.integers(0, pk[0] - 1), min_size=pk[1], max_size=pk[1]) for _ in range(3)],
    )
)


@settings(max_examples=200, deadline=None)
@given(field_and_elems)
def test_field_axioms(data):
    (p, k), a, b, c = data
    F = make_field(p, k)
    a, b, c = F.element(a), F.element(b), F.element(c)
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == F.zero
    if a:
        assert a * a.inverse() == F.one
    assert (a + b) ** p == a**p + b**p
