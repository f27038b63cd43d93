import pytest
import sympy
from sympy import Matrix, Poly, binomial, symbols


from ruledfib.cocycle import (
    CocycleRing,
    build_sym_matrix,
    conjugation_difference,
    verify_block_structure,
    verify_cocycle_condition,
    verify_conjugation,
)
from ruledfib.errors import ExponentOutOfRange, NonPrime

f, gi, gj, lam = symbols("f gi gj lam")


def reference(m, x):
    """Sym^m of the unipotent matrix [[1, x], [0, 1]] in the monomial basis."""
    return Matrix(m + 1, m + 1, lambda r, c: binomial(m - r, c - r) * x ** (c - r) if c >= r else 0)


def to_sympy(A):
    ring = A[0][0].ring
    syms = symbols(" ".join(ring.vars)) if len(ring.vars) > 1 else (symbols(ring.vars[0]),)

    def conv(poly):
        return sum(c * sympy.prod([v**k for v, k in zip(syms, e)]) for e, c in poly.terms.items())

    return Matrix([[conv(x) for x in row] for row in A])


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_sym_matrix_against_sympy(p):
    for m in range(p + 1):
        diff = to_sympy(build_sym_matrix(p, m)) - reference(m, f)
        assert all(Poly(e, f, modulus=p).is_zero for e in diff)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sym_matrix_is_representation_sympy(p):
    x, y = symbols("x y")
    for m in range(p + 1):
        lhs = (reference(m, x) * reference(m, y)).expand()
        rhs = reference(m, x + y).expand()
        assert (lhs - rhs).expand() == sympy.zeros(m + 1)
    assert verify_cocycle_condition(p, p)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("mode", ["ordinary", "supersingular"])
def test_conjugation(p, mode):
    assert verify_block_structure(p)
    assert verify_conjugation(p, mode)


@pytest.mark.parametrize("p", [3, 5])
def test_conjugation_by_sympy(p):
    """Recompute A P_i - P_j A~ in sympy, reduce f^p with the relation, compare to zero."""
    A = reference(p, f)
    n = p + 1

    def P(g):
        M = sympy.eye(n)
        M[0, p - 1] = lam
        M[0, p] = -g
        return M

    At = sympy.diag(1, reference(p - 1, f))
    D = (A * P(gi) - P(gj) * At).expand()
    rel = lam * f + gi - gj

    def reduce(e):
        e = sympy.expand(e).subs(f**p, rel)
        return Poly(sympy.expand(e), f, gi, gj, lam, modulus=p).as_expr() if e != 0 else 0

    assert D.applyfunc(reduce) == sympy.zeros(n)


def test_ring_rules():
    R = CocycleRing(3)
    F = R.var("f")
    assert F**3 == R.var("lam") * F + R.var("gi") - R.var("gj")
    assert R.const(3).is_zero()
    S = CocycleRing(3, lam_zero=True)
    assert S.var("f") ** 3 == S.var("gi") - S.var("gj")


def test_errors():
    with pytest.raises(NonPrime):
        CocycleRing(6)
    with pytest.raises(ExponentOutOfRange):
        build_sym_matrix(3, 4)
    with pytest.raises(ValueError):
        conjugation_difference(3, "other")
