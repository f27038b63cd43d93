"""Elliptic curves in long Weierstrass form over F_{p^k}.

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6

The chord-tangent formulas used here are the characteristic-free ones, so
characteristics 2 and 3 need no special casing. Point counts come from a pass
over all x-coordinates; everything else (orders, torsion, group structure) is
naive enumeration, which is the intended scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterator, Optional

from .errors import MixedCurves, NeedsFieldExtension, SingularCurve
from .finite_field import (
    FieldDesc,
    FieldElement,
    element_from_json,
    element_to_json,
    embed,
    extension,
    field_from_json,
)

#: Enumeration cap used by the extension searches (points are listed one by one).
DEFAULT_SEARCH_FIELD = 2**12
DEFAULT_MAX_EXTENSION = 12


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _abs_trace_f2(t: FieldElement) -> int:
    acc = t
    s = t
    for _ in range(t.desc.k - 1):
        s = s * s
        acc = acc + s
    return acc.coeffs[0]


class Curve:
    """A smooth Weierstrass curve; point count, trace and supersingularity are cached."""

    def __init__(self, field: FieldDesc, a1, a2, a3, a4, a6):
        self.field = field
        self.a1, self.a2, self.a3, self.a4, self.a6 = (field(c) for c in (a1, a2, a3, a4, a6))
        if not self.discriminant:
            raise SingularCurve(f"discriminant vanishes for {self}")
        self.order = self._count()
        self.trace = field.q + 1 - self.order
        assert self.trace * self.trace <= 4 * field.q, "Hasse bound violated"
        self.supersingular = self.trace % field.p == 0

    # -- invariants
    @property
    def coefficients(self) -> tuple[FieldElement, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def discriminant(self) -> FieldElement:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @cached_property
    def j_invariant(self) -> FieldElement:
        b2, b4, _, _ = self.b_invariants
        c4 = b2 * b2 - 24 * b4
        return c4**3 / self.discriminant

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def ordinary(self) -> bool:
        return not self.supersingular

    def __eq__(self, other):
        return (
            isinstance(other, Curve)
            and self.field == other.field
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash((self.field, self.coefficients))

    def __repr__(self):
        names = ("a1", "a2", "a3", "a4", "a6")
        parts = [f"{n}={c!r}" for n, c in zip(names, self.coefficients) if c]
        return f"Curve({self.field!r}; {', '.join(parts)})"

    # -- points
    @cached_property
    def infinity(self) -> "CurvePoint":
        return CurvePoint(self, None, None)

    def contains(self, x: FieldElement, y: FieldElement) -> bool:
        a1, a2, a3, a4, a6 = self.coefficients
        return y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6

    def point(self, x, y) -> "CurvePoint":
        x, y = self.field(x), self.field(y)
        if not self.contains(x, y):
            raise ValueError(f"({x}, {y}) is not on {self}")
        return CurvePoint(self, x, y)

    def _rhs(self, x: FieldElement) -> FieldElement:
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def _count(self) -> int:
        F = self.field
        n = 1
        if F.p == 2:
            for x in F.elements():
                b = self.a1 * x + self.a3
                if not b:
                    n += 1
                elif _abs_trace_f2(self._rhs(x) / (b * b)) == 0:
                    n += 2
        else:
            half = (F.q - 1) // 2
            for x in F.elements():
                b = self.a1 * x + self.a3
                disc = b * b + 4 * self._rhs(x)
                if not disc:
                    n += 1
                elif disc**half == F.one:
                    n += 2
        return n

    def y_coordinates(self, x: FieldElement) -> list[FieldElement]:
        """All y with (x, y) on the curve."""
        F = self.field
        b = self.a1 * x + self.a3
        c = self._rhs(x)
        if F.p == 2:
            if not b:
                return [c ** (F.q // 2)]
            z = self._artin_schreier_table.get(c / (b * b))
            return [] if z is None else sorted((b * z, b * (z + 1)), key=FieldElement.to_int)
        s = self._sqrt_table.get(b * b + 4 * c)
        if s is None:
            return []
        inv2 = F(2).inverse()
        ys = {(-b + s) * inv2, (-b - s) * inv2}
        return sorted(ys, key=FieldElement.to_int)

    @cached_property
    def _sqrt_table(self) -> dict:
        table = {}
        for y in self.field.elements():
            table.setdefault(y * y, y)
        return table

    @cached_property
    def _artin_schreier_table(self) -> dict:
        table = {}
        for z in self.field.elements():
            table.setdefault(z * z + z, z)
        return table

    @cached_property
    def points(self) -> tuple["CurvePoint", ...]:
        pts = [self.infinity]
        for x in self.field.elements():
            for y in self.y_coordinates(x):
                pts.append(CurvePoint(self, x, y))
        assert len(pts) == self.order
        return tuple(pts)

    def __iter__(self) -> Iterator["CurvePoint"]:
        return iter(self.points)

    # -- group structure
    def torsion(self, n: int) -> list["CurvePoint"]:
        """Rational points killed by n."""
        return [P for P in self.points if (n * P).is_infinity]

    def points_of_order(self, n: int) -> list["CurvePoint"]:
        return [P for P in self.points if point_order(P) == n]

    @cached_property
    def exponent(self) -> int:
        e = 1
        for P in self.points:
            o = point_order(P)
            e = e * o // gcd(e, o)
        return e

    def group_structure(self) -> tuple[int, ...]:
        """Invariant factors (n1, n2) with E(F_q) = Z/n1 x Z/n2 and n2 | n1."""
        n1 = self.exponent
        n2 = self.order // n1
        return (n1,) if n2 == 1 else (n1, n2)

    # -- base change and twists
    def base_change(self, big: FieldDesc) -> "Curve":
        if big == self.field:
            return self
        return Curve(big, *(embed(c, big) for c in self.coefficients))

    def frobenius_twist(self, power: int = 1) -> "Curve":
        """Curve with every coefficient raised to p^power (power taken mod k)."""
        power %= self.field.k
        if power == 0:
            return self
        e = self.field.p**power
        return Curve(self.field, *(c**e for c in self.coefficients))

    def to_json(self) -> dict:
        out = {"field": self.field.to_json()}
        for name, c in zip(("a1", "a2", "a3", "a4", "a6"), self.coefficients):
            out[name] = element_to_json(c)
        return out


def make_curve(field: FieldDesc, a1=0, a2=0, a3=0, a4=0, a6=0) -> Curve:
    return Curve(field, a1, a2, a3, a4, a6)


def curve_from_json(obj: dict) -> Curve:
    F = field_from_json(obj["field"])
    coeffs = [element_from_json(F, obj.get(name, 0)) for name in ("a1", "a2", "a3", "a4", "a6")]
    return Curve(F, *coeffs)


@dataclass(frozen=True, eq=False)
class CurvePoint:
    curve: Curve
    x: Optional[FieldElement]
    y: Optional[FieldElement]

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        return self.curve == other.curve and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return "O" if self.is_infinity else f"({self.x!r}, {self.y!r})"

    def __neg__(self):
        if self.is_infinity:
            return self
        E = self.curve
        return CurvePoint(E, self.x, -self.y - E.a1 * self.x - E.a3)

    def __add__(self, other):
        return add_points(self, other)

    def __sub__(self, other):
        return add_points(self, -other)

    def __rmul__(self, n: int):
        return scalar_mul(n, self)

    def sort_key(self):
        return (-1, -1) if self.is_infinity else (self.x.to_int(), self.y.to_int())

    def to_json(self):
        return None if self.is_infinity else [element_to_json(self.x), element_to_json(self.y)]

    def embed(self, big_curve: Curve) -> "CurvePoint":
        if self.is_infinity:
            return big_curve.infinity
        F = big_curve.field
        return big_curve.point(embed(self.x, F), embed(self.y, F))


def add_points(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    E = P.curve
    if Q.curve is not E and Q.curve != E:
        raise MixedCurves("points lie on different curves")
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a1, a2, a3, a4, a6 = E.coefficients
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if not (y1 + y2 + a1 * x2 + a3):
            return E.infinity
        den = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        den = x2 - x1
        lam = (y2 - y1) / den
        nu = (y1 * x2 - y2 * x1) / den
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(E, x3, y3)


def scalar_mul(n: int, P: CurvePoint) -> CurvePoint:
    if n < 0:
        return scalar_mul(-n, -P)
    result = P.curve.infinity
    addend = P
    while n:
        if n & 1:
            result = result + addend
        addend = addend + addend
        n >>= 1
    return result


def point_order(P: CurvePoint) -> int:
    """Least n >= 1 with nP = O; found among the divisors of #E(F_q)."""
    if P.is_infinity:
        return 1
    n = P.curve.order
    for r in _factor(n):
        while n % r == 0 and scalar_mul(n // r, P).is_infinity:
            n //= r
    return n


def point_sum(points) -> CurvePoint:
    points = list(points)
    acc = points[0].curve.infinity
    for P in points:
        acc = acc + P
    return acc


# --- bounded extension searches -------------------------------------------------

def extensions_within(E: Curve, max_degree: int = DEFAULT_MAX_EXTENSION,
                      max_size: int = DEFAULT_SEARCH_FIELD) -> Iterator[tuple[int, Curve]]:
    """Yield (j, E over F_{q^j}) for j = 1, 2, ... while the field stays enumerable."""
    for j in range(1, max_degree + 1):
        if E.field.q**j > max_size:
            return
        yield j, E.base_change(extension(E.field, j, max_size=max_size))


def find_point_of_order(E: Curve, n: int, max_degree: int = DEFAULT_MAX_EXTENSION,
                        max_size: int = DEFAULT_SEARCH_FIELD) -> tuple[Curve, CurvePoint]:
    """A point of exact order n over the smallest extension where one exists.

    Returns the (possibly base-changed) curve and the point; raises
    NeedsFieldExtension(degree=None) if the search bound is exhausted.
    """
    for _, Ej in extensions_within(E, max_degree, max_size):
        if Ej.order % n:
            continue
        pts = Ej.points_of_order(n)
        if pts:
            return Ej, min(pts, key=CurvePoint.sort_key)
    raise NeedsFieldExtension(
        f"no point of order {n} on {E} over extensions of degree <= {max_degree} "
        f"with at most {max_size} elements; unreachable at this field size"
    )


def full_torsion_field(E: Curve, n: int, max_degree: int = DEFAULT_MAX_EXTENSION,
                       max_size: int = DEFAULT_SEARCH_FIELD) -> Curve:
    """Smallest extension over which E[n] has n^2 points (p not dividing n)."""
    for _, Ej in extensions_within(E, max_degree, max_size):
        if Ej.order % (n * n) == 0 and len(Ej.torsion(n)) == n * n:
            return Ej
    raise NeedsFieldExtension(f"E[{n}] not rational within the search bound")


def halves(Q: CurvePoint, n: int = 2) -> list[CurvePoint]:
    """Rational points P with nP = Q."""
    return [P for P in Q.curve.points if scalar_mul(n, P) == Q]
