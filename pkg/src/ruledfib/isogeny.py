"""Isogenies between Weierstrass curves.

Four concrete kinds are built here: the relative Frobenius E -> E^(p), Velu
quotients by a rational cyclic subgroup, duals, and composites. A dual is
evaluated through the identity dual(phi)(phi(P)) = deg(phi) * P, so it never
needs an explicit rational map; its preimages are found among images of
rational points of the original domain.
"""

from __future__ import annotations

from functools import cached_property
from typing import Callable, Optional, Sequence

from .elliptic_curve import (
    DEFAULT_MAX_EXTENSION,
    DEFAULT_SEARCH_FIELD,
    Curve,
    CurvePoint,
    scalar_mul,
)
from .errors import CharZero, IrrationalKernel, MixedCurves, NeedsFieldExtension, OrderOne
from .finite_field import extension


def geometric_torsion_size(E: Curve, n: int) -> int:
    """|E[n](k-bar)|: n'^2 times p^v on ordinary curves, n'^2 on supersingular ones (n = n' p^v)."""
    p = E.p
    v = 0
    m = n
    while m % p == 0:
        m //= p
        v += 1
    return m * m * (p**v if E.ordinary else 1)


class Isogeny:
    """A degree-n isogeny with separability metadata.

    ``kernel_points`` is the list of rational kernel points (including O); it is
    empty for Frobenius. ``sep_degree`` is the number of geometric kernel points.
    """

    def __init__(
        self,
        domain: Curve,
        codomain: Curve,
        degree: int,
        kind: str,
        *,
        separable: bool,
        dual_separable: bool,
        sep_degree: int,
        evaluate: Callable[[CurvePoint], CurvePoint],
        kernel_points: Sequence[CurvePoint] = (),
        parts: tuple = (),
        velu_data: Optional[dict] = None,
        rebuild: Optional[Callable] = None,
    ):
        self.domain = domain
        self.codomain = codomain
        self.degree = degree
        self.kind = kind
        self.separable = separable
        self.dual_separable = dual_separable
        self.sep_degree = sep_degree
        self._evaluate = evaluate
        self.kernel_points = tuple(kernel_points)
        self.parts = parts
        self.velu_data = velu_data
        self._rebuild = rebuild

    def __repr__(self):
        return f"Isogeny({self.kind}, deg {self.degree}: {self.domain} -> {self.codomain})"

    def __call__(self, P: CurvePoint) -> CurvePoint:
        if P.curve != self.domain:
            raise MixedCurves(f"{P} is not on the domain of {self}")
        if P.is_infinity:
            return self.codomain.infinity
        return self._evaluate(P)

    @property
    def inseparable_degree(self) -> int:
        return self.degree // self.sep_degree

    @property
    def purely_inseparable(self) -> bool:
        return self.sep_degree == 1

    @cached_property
    def image_table(self) -> dict:
        """Map from image points to one rational preimage each."""
        table = {}
        for P in self.domain.points:
            table.setdefault(self(P), P)
        return table

    def base_change(self, big) -> "Isogeny":
        """The same isogeny over an extension field ``big``."""
        return self._rebuild(big)


# --- constructors ----------------------------------------------------------------

def identity_isogeny(E: Curve) -> Isogeny:
    return Isogeny(E, E, 1, "identity", separable=True, dual_separable=True, sep_degree=1,
                   evaluate=lambda P: P, kernel_points=[E.infinity],
                   rebuild=lambda big: identity_isogeny(E.base_change(big)))


def frobenius_isogeny(E: Curve) -> Isogeny:
    """The relative Frobenius E -> E^(p), (x, y) -> (x^p, y^p)."""
    p = getattr(E, "p", 0)
    if not p:
        raise CharZero("no Frobenius in characteristic 0")
    target = E.frobenius_twist(1)

    def evaluate(P):
        return CurvePoint(target, P.x**p, P.y**p)

    return Isogeny(E, target, p, "frobenius", separable=False, dual_separable=E.ordinary,
                   sep_degree=1, evaluate=evaluate,
                   rebuild=lambda big: frobenius_isogeny(E.base_change(big)))


def subgroup_generated(points: Sequence[CurvePoint]) -> list[CurvePoint]:
    E = points[0].curve
    group = {E.infinity}
    frontier = [E.infinity]
    while frontier:
        new = []
        for A in frontier:
            for G in points:
                B = A + G
                if B not in group:
                    group.add(B)
                    new.append(B)
        frontier = new
    return sorted(group, key=CurvePoint.sort_key)


def velu_quotient(E: Curve, K) -> Isogeny:
    """Separable isogeny with kernel generated by K (a point or a list of points).

    Velu's formulas in long Weierstrass form, valid in every characteristic.
    """
    gens = list(K) if isinstance(K, (list, tuple)) else [K]
    for G in gens:
        if G.curve != E:
            raise IrrationalKernel(
                f"kernel generator {G} is not a point of {E} over {E.field!r}; "
                "extend the field first"
            )
    kernel = subgroup_generated(gens)
    if len(kernel) == 1:
        raise OrderOne("kernel generator has order 1")
    a1, a2, a3, a4, a6 = E.coefficients
    two_torsion, reps, seen = [], [], set()
    for Q in kernel[1:]:
        if Q in seen:
            continue
        if Q == -Q:
            two_torsion.append(Q)
            seen.add(Q)
        else:
            reps.append(Q)
            seen.update((Q, -Q))
    data = []
    t = w = E.field.zero
    for Q in two_torsion + reps:
        gx = 3 * Q.x * Q.x + 2 * a2 * Q.x + a4 - a1 * Q.y
        gy = -2 * Q.y - a1 * Q.x - a3
        tq = gx if Q in two_torsion else 2 * gx - a1 * gy
        uq = gy * gy
        t = t + tq
        w = w + uq + Q.x * tq
        data.append((Q.x, Q.y, gx, gy, tq, uq))
    b2 = a1 * a1 + 4 * a2
    target = Curve(E.field, a1, a2, a3, a4 - 5 * t, a6 - b2 * t - 7 * w)

    def evaluate(P):
        x, y = P.x, P.y
        X, Y = x, y
        for xq, yq, gx, gy, tq, uq in data:
            d = x - xq
            if not d:
                return target.infinity
            inv = d.inverse()
            inv2 = inv * inv
            X = X + tq * inv + uq * inv2
            Y = Y - (uq * (2 * y + a1 * x + a3) * inv2 * inv
                     + tq * (a1 * d + y - yq) * inv2
                     + (a1 * uq - gx * gy) * inv2)
        return CurvePoint(target, X, Y)

    def rebuild(big):
        Eb = E.base_change(big)
        return velu_quotient(Eb, [G.embed(Eb) for G in gens])

    n = len(kernel)
    return Isogeny(E, target, n, "velu", separable=True, dual_separable=(n % E.p != 0),
                   sep_degree=n, evaluate=evaluate, kernel_points=kernel,
                   velu_data={"v": t, "w": w}, rebuild=rebuild)


def dual_isogeny(phi: Isogeny) -> Isogeny:
    """The dual, evaluated as R = phi(P) -> deg(phi) * P."""
    n = phi.degree
    sep = geometric_torsion_size(phi.domain, n) // phi.sep_degree

    def evaluate(R):
        P = phi.image_table.get(R)
        if P is None:
            raise NeedsFieldExtension(f"{R} has no rational preimage under {phi}")
        return scalar_mul(n, P)

    return Isogeny(phi.codomain, phi.domain, n, "dual", separable=phi.dual_separable,
                   dual_separable=phi.separable, sep_degree=sep, evaluate=evaluate,
                   parts=(phi,), rebuild=lambda big: dual_isogeny(phi.base_change(big)))


def compose(phi: Isogeny, psi: Isogeny) -> Isogeny:
    """phi o psi (psi applied first)."""
    if psi.codomain != phi.domain:
        raise MixedCurves("isogenies are not composable")
    return Isogeny(psi.domain, phi.codomain, phi.degree * psi.degree, "composite",
                   separable=phi.separable and psi.separable,
                   dual_separable=phi.dual_separable and psi.dual_separable,
                   sep_degree=phi.sep_degree * psi.sep_degree,
                   evaluate=lambda P: phi(psi(P)), parts=(phi, psi),
                   rebuild=lambda big: compose(phi.base_change(big), psi.base_change(big)))


# --- preimages ---------------------------------------------------------------------

def _rational_preimage_divisor(phi: Isogeny, Q: CurvePoint) -> list[tuple[CurvePoint, int]]:
    mult = phi.inseparable_degree
    if phi.kind == "identity":
        return [(Q, 1)]
    if phi.kind == "frobenius":
        e = phi.domain.field.q // phi.domain.p
        if Q.is_infinity:
            return [(phi.domain.infinity, mult)]
        return [(CurvePoint(phi.domain, Q.x**e, Q.y**e), mult)]
    if phi.kind == "composite":
        outer, inner = phi.parts
        out: dict = {}
        for R, m1 in _rational_preimage_divisor(outer, Q):
            for P, m2 in _rational_preimage_divisor(inner, R):
                out[P] = out.get(P, 0) + m1 * m2
        return sorted(out.items(), key=lambda item: item[0].sort_key())
    if phi.kind == "dual":
        (orig,) = phi.parts
        n = orig.degree
        found = [R for R, P in orig.image_table.items() if scalar_mul(n, P) == Q]
        return [(R, mult) for R in sorted(found, key=CurvePoint.sort_key)]
    found = [P for P in phi.domain.points if phi(P) == Q]
    return [(P, mult) for P in sorted(found, key=CurvePoint.sort_key)]


def preimage_divisor(phi: Isogeny, Q: CurvePoint, max_degree: int = DEFAULT_MAX_EXTENSION,
                     max_size: int = DEFAULT_SEARCH_FIELD) -> list[tuple[CurvePoint, int]]:
    """phi^*(Q) as a list of (point, multiplicity); multiplicities sum to deg(phi).

    Raises NeedsFieldExtension with the least extension degree (found by search)
    over which all preimages become rational.
    """
    if Q.curve != phi.codomain:
        raise MixedCurves(f"{Q} is not on the codomain of {phi}")
    div = _rational_preimage_divisor(phi, Q)
    if sum(m for _, m in div) == phi.degree:
        return div
    base = phi.domain.field
    for j in range(2, max_degree + 1):
        if base.q**j > max_size:
            break
        big = extension(base, j, max_size=max_size)
        phi_big = phi.base_change(big)
        Q_big = Q.embed(phi_big.codomain)
        if sum(m for _, m in _rational_preimage_divisor(phi_big, Q_big)) == phi.degree:
            raise NeedsFieldExtension(
                f"preimages of {Q} under {phi.kind} isogeny need an extension of degree {j}", degree=j
            )
    raise NeedsFieldExtension(f"preimages of {Q} not found within the search bound", degree=None)


def preimages(phi: Isogeny, Q: CurvePoint, **kw) -> list[CurvePoint]:
    """Distinct points of the domain mapping to Q (see :func:`preimage_divisor`)."""
    return [P for P, _ in preimage_divisor(phi, Q, **kw)]


def kernel_divisor(phi: Isogeny) -> list[tuple[CurvePoint, int]]:
    return preimage_divisor(phi, phi.codomain.infinity)


def base_change_point(P: CurvePoint, big_curve: Curve) -> CurvePoint:
    return P.embed(big_curve)


def isogeny_to_json(phi: Isogeny) -> dict:
    return {
        "kind": phi.kind,
        "degree": phi.degree,
        "separable": phi.separable,
        "dual_separable": phi.dual_separable,
        "domain": phi.domain.to_json(),
        "codomain": phi.codomain.to_json(),
        "kernel_points": [P.to_json() for P in phi.kernel_points],
    }

