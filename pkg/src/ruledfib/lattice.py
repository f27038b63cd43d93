"""Numerical classes on a ruled surface P(E) -> E.

Only the rank-2 lattice Z*C0 + Z*F is modelled, with C0^2 = -e, C0.F = 1, F^2 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MixedSurfaces, OutOfScope


@dataclass(frozen=True)
class SurfaceClass:
    c0: int
    f: int
    e: int

    def _same(self, other: "SurfaceClass"):
        if self.e != other.e:
            raise MixedSurfaces(f"classes live on surfaces with e = {self.e} and e = {other.e}")

    def __add__(self, other):
        self._same(other)
        return SurfaceClass(self.c0 + other.c0, self.f + other.f, self.e)

    def __neg__(self):
        return SurfaceClass(-self.c0, -self.f, self.e)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return SurfaceClass(n * self.c0, n * self.f, self.e)

    def __repr__(self):
        return f"{self.c0}*C0 + {self.f}*F  (e={self.e})"

    def to_json(self):
        return {"c0": self.c0, "f": self.f, "e": self.e}


def intersect(x: SurfaceClass, y: SurfaceClass) -> int:
    x._same(y)
    return -x.e * x.c0 * y.c0 + x.c0 * y.f + x.f * y.c0


def section(e: int) -> SurfaceClass:
    return SurfaceClass(1, 0, e)


def ruling_fiber(e: int) -> SurfaceClass:
    return SurfaceClass(0, 1, e)


def canonical_class(e: int) -> SurfaceClass:
    """K = -2 C0 - e F numerically."""
    return SurfaceClass(-2, -e, e)


def minus_K_nef(e: int) -> bool:
    return e in (0, -1)


def normalized_bundle_menu(e: int, p: int = 0) -> list[dict]:
    """Normalized rank-2 shapes with the given e that can carry an elliptic fibration."""
    if e == 0:
        return [
            {"shape": "O+L", "parameter": "L in Pic^0 E", "decomposable": True},
            {"shape": "E20", "parameter": None, "decomposable": False},
        ]
    if e == -1:
        return [{"shape": "EQ", "parameter": "Q in E", "decomposable": False}]
    raise OutOfScope(f"e = {e}: -K is not nef, no elliptic fibration")


def fiber_reduction_class(e: int) -> SurfaceClass:
    """Numerical class of the reduction D of a multiple fiber (m = 1 when none).

    K = -2D when e = 0 and K = -D when e = -1, so D = C0 or D = 2 C0 - F.
    """
    if e == 0:
        return SurfaceClass(1, 0, 0)
    if e == -1:
        return SurfaceClass(2, -1, -1)
    raise OutOfScope(f"e = {e}")


def pullback_class(x: SurfaceClass, degree: int, e_upper: int) -> SurfaceClass:
    """q^* along the base change of the ruling by a degree-n cover of elliptic curves.

    q^* F = n F'; q^* C0 = C0' + b F' where (q^* C0)^2 = n C0^2 fixes b.
    """
    twice_b = degree * (-x.e) + e_upper
    if twice_b % 2:
        raise OutOfScope(f"no integral pullback from e = {x.e} to e = {e_upper} in degree {degree}")
    b = twice_b // 2
    return SurfaceClass(x.c0, x.c0 * b + degree * x.f, e_upper)


def class_ratio(x: SurfaceClass, y: SurfaceClass) -> Fraction | None:
    """r with x = r*y numerically, or None if x and y are not proportional."""
    x._same(y)
    if y.c0 == 0 and y.f == 0:
        return None
    r = Fraction(x.c0, y.c0) if y.c0 else Fraction(x.f, y.f)
    if r * y.c0 != x.c0 or r * y.f != x.f:
        return None
    return r


def reduction_pullback_ratio(e: int, e_upper: int, degree: int) -> Fraction:
    """q^* D = r * D' for the reductions of multiple fibers below and above."""
    D = fiber_reduction_class(e)
    D_up = fiber_reduction_class(e_upper)
    r = class_ratio(pullback_class(D, degree, e_upper), D_up)
    if r is None:
        raise OutOfScope("pulled-back reduction is not proportional to the upper one")
    return r
