"""Transition matrices of Sym^m E_{2,0} and the Frobenius splitting identity.

Polynomials live in a small sparse ring over F_p with formal generators. The
relation ring carries one rewrite rule, f^p -> lam*f + gi - gj, and keeps
every polynomial reduced. With ``lam_zero`` the generator lam is set to 0.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Optional

from .errors import ExponentOutOfRange, NonPrime
from .finite_field import is_prime

RELATION_VARS = ("f", "gi", "gj", "lam")


class CocycleRing:
    def __init__(self, p: int, variables: Iterable[str] = RELATION_VARS, *,
                 rewrite: bool = True, lam_zero: bool = False):
        if not is_prime(p):
            raise NonPrime(f"{p} is not prime")
        self.p = p
        self.vars = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.rewrite = rewrite and "f" in self.index
        self.lam_zero = lam_zero

    def __repr__(self):
        rule = ", f^p -> lam*f + gi - gj" if self.rewrite else ""
        return f"F_{self.p}[{', '.join(self.vars)}]{rule}"

    def zero(self) -> "Poly":
        return Poly(self, {})

    def const(self, c: int) -> "Poly":
        return Poly(self, {(0,) * len(self.vars): c})

    def var(self, name: str) -> "Poly":
        e = [0] * len(self.vars)
        e[self.index[name]] = 1
        return Poly(self, {tuple(e): 1})

    def _rule_rhs(self) -> dict:
        """lam*f + gi - gj as a term dict (lam dropped in supersingular mode)."""
        n = len(self.vars)
        out = {}

        def mono(**powers):
            e = [0] * n
            for k, v in powers.items():
                e[self.index[k]] = v
            return tuple(e)

        if not self.lam_zero:
            out[mono(lam=1, f=1)] = 1
        out[mono(gi=1)] = 1
        out[mono(gj=1)] = self.p - 1
        return out

    def normalize(self, terms: dict) -> dict:
        """Reduce coefficients mod p, kill lam if required, apply the rewrite rule."""
        p = self.p
        lam = self.index.get("lam")
        fi = self.index.get("f")
        work = dict(terms)
        done: dict = {}
        rhs = self._rule_rhs() if self.rewrite else None
        while work:
            e, c = work.popitem()
            c %= p
            if not c:
                continue
            if self.lam_zero and lam is not None and e[lam]:
                continue
            if rhs is not None and e[fi] >= p:
                base = list(e)
                base[fi] -= p
                for r, rc in rhs.items():
                    t = tuple(x + y for x, y in zip(base, r))
                    work[t] = work.get(t, 0) + c * rc
                continue
            done[e] = (done.get(e, 0) + c) % p
            if not done[e]:
                del done[e]
        return done


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: CocycleRing, terms: dict, reduced: bool = False):
        self.ring = ring
        self.terms = terms if reduced else ring.normalize(terms)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring:
                raise ValueError("polynomials from different rings")
            return other
        return self.ring.const(int(other))

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.ring.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in(self, name: str) -> int:
        i = self.ring.index[name]
        return max((e[i] for e in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.ring.vars, e) if k
            )
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


Matrix = list  # list of rows of Poly


def _check_exponent(p: int, m: int):
    if not 0 <= m <= p:
        raise ExponentOutOfRange(f"m = {m} outside 0..{p}")


def sym_matrix(ring: CocycleRing, m: int, x: Optional[Poly] = None) -> Matrix:
    """A^(m) with entry (r, c) = C(m - r, c - r) x^(c - r), upper triangular."""
    _check_exponent(ring.p, m)
    if x is None:
        x = ring.var("f")
    powers = [ring.const(1)]
    for _ in range(m):
        powers.append(powers[-1] * x)
    zero = ring.zero()
    return [
        [ring.const(comb(m - r, c - r)) * powers[c - r] if c >= r else zero for c in range(m + 1)]
        for r in range(m + 1)
    ]


def build_sym_matrix(p: int, m: int) -> Matrix:
    """A^(m) over the free ring F_p[f] (no rewriting)."""
    return sym_matrix(CocycleRing(p, ("f",), rewrite=False), m)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k, l = len(A), len(B), len(B[0])
    zero = A[0][0].ring.zero()
    out = []
    for i in range(n):
        row = []
        for j in range(l):
            acc = zero
            for t in range(k):
                if A[i][t].terms and B[t][j].terms:
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero_matrix(A: Matrix) -> bool:
    return all(x.is_zero() for row in A for x in row)


def matrix_to_json(A: Matrix) -> list:
    return [[repr(x) for x in row] for row in A]


def verify_block_structure(p: int) -> bool:
    """A^(p) has top row (1, 0, ..., 0, f^p) and lower-right block A^(p-1)."""
    ring = CocycleRing(p, ("f",), rewrite=False)
    A = sym_matrix(ring, p)
    f = ring.var("f")
    top = [ring.const(1)] + [ring.zero()] * (p - 1) + [f**p]
    if A[0] != top:
        return False
    if any(not A[r][0].is_zero() for r in range(1, p + 1)):
        return False
    B = sym_matrix(ring, p - 1)
    return all(A[r + 1][c + 1] == B[r][c] for r in range(p) for c in range(p))


def conjugation_data(p: int, mode: str):
    """(ring, A^(p), P_i, P_j, A-tilde) for the splitting identity A P_i = P_j A-tilde."""
    if mode not in ("ordinary", "supersingular"):
        raise ValueError(f"mode must be ordinary or supersingular, not {mode!r}")
    ring = CocycleRing(p, RELATION_VARS, lam_zero=(mode == "supersingular"))
    n = p + 1
    one, zero = ring.const(1), ring.zero()
    lam = ring.var("lam")

    def P(g: Poly) -> Matrix:
        M = [[one if r == c else zero for c in range(n)] for r in range(n)]
        M[0][p - 1] = lam
        M[0][p] = -g
        return M

    A = sym_matrix(ring, p)
    low = sym_matrix(ring, p - 1)
    At = [[one] + [zero] * p] + [[zero] + row for row in low]
    return ring, A, P(ring.var("gi")), P(ring.var("gj")), At


def conjugation_difference(p: int, mode: str) -> Matrix:
    ring, A, Pi, Pj, At = conjugation_data(p, mode)
    return mat_sub(mat_mul(A, Pi), mat_mul(Pj, At))


def verify_conjugation(p: int, mode: str) -> bool:
    return is_zero_matrix(conjugation_difference(p, mode))


def verify_cocycle_condition(p: int, m: int) -> bool:
    """A(f_ij) A(f_jk) = A(f_ij + f_jk) as matrices over F_p[f_ij, f_jk]."""
    ring = CocycleRing(p, ("fij", "fjk"), rewrite=False)
    x, y = ring.var("fij"), ring.var("fjk")
    lhs = mat_mul(sym_matrix(ring, m, x), sym_matrix(ring, m, y))
    return is_zero_matrix(mat_sub(lhs, sym_matrix(ring, m, x + y)))
