"""Resolution squares F x P^1 -> S -> P^1 and their bookkeeping.

A diagram records, for each point Q of the lower P^1 carrying a multiple fiber
or a branch point of psi, the multiplicity m of the fiber of pi over Q and, for
each Q'_i in psi^{-1}(Q), the ramification index e_i and the multiplicity m'_i
of the fiber of pi' over Q'_i. Multi-step resolutions are towers of stages; the
composite of a tower is again a diagram.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

from .bundles import (
    O,
    AtiyahTriv,
    ExtQ,
    SymbolicCurveHandle,
    SymbolicIsogeny,
    direct_sum,
    kill_torsion_line,
    pullback_extending,
    summands,
    verify_killed,
)
from .elliptic_curve import Curve, find_point_of_order, point_order
from .errors import InseparableInput, InvalidInput, UnsupportedCase
from .isogeny import Isogeny, dual_isogeny, frobenius_isogeny, velu_quotient
from .lattice import reduction_pullback_ratio

RESTRICTIONS = ("iso", "separable", "inseparable")


@dataclass(frozen=True)
class Preimage:
    label: str
    e: int
    m_up: int = 1
    wild_up: bool = False
    restriction: Optional[str] = None  # q restricted to the reduced upper fiber

    def to_json(self):
        return {"label": self.label, "e": self.e, "m_up": self.m_up, "wild_up": self.wild_up,
                "restriction": self.restriction}


@dataclass(frozen=True)
class BasePoint:
    label: str
    m: int
    preimages: tuple
    a: Optional[int] = None
    wild: Optional[bool] = None  # flag of the lower fiber, when known

    def to_json(self):
        return {"label": self.label, "m": self.m, "a": self.a, "wild": self.wild,
                "preimages": [P.to_json() for P in self.preimages]}


@dataclass
class PsiData:
    """Ramification of psi: P^1 -> P^1 as (label, ((e, delta), ...)) per branch point."""

    degree: int
    p: int
    separable: bool
    branch_points: tuple = ()

    @classmethod
    def from_json(cls, obj: dict) -> "PsiData":
        return cls(obj["degree"], obj["p"], obj.get("separable", True), tuple(
            (b["label"], tuple((int(e), int(dl)) for e, dl in b["ramification"]))
            for b in obj.get("branch_points", [])
        ))

    def to_json(self):
        return {
            "degree": self.degree, "p": self.p, "separable": self.separable,
            "branch_points": [
                {"label": lab, "ramification": [[e, dl] for e, dl in ram]}
                for lab, ram in self.branch_points
            ],
        }


@dataclass
class CoverDiagram:
    case_id: str
    p: int
    degree: int  # deg phi = deg q = deg psi
    psi_separable: bool
    base_points: tuple
    e_lower: int
    e_upper: int
    m_lower: int  # common multiplicity below (1 without multiple fibers)
    m_upper: int
    deg_q: Optional[int] = None
    deg_psi: Optional[int] = None
    phi: object = None
    psi: Optional[PsiData] = None
    stages: tuple = ()
    bundle_check: Optional[dict] = None
    notes: tuple = ()

    def __post_init__(self):
        if self.deg_q is None:
            self.deg_q = self.degree
        if self.deg_psi is None:
            self.deg_psi = self.degree

    @property
    def top_row_trivial(self) -> bool:
        return all(P.m_up == 1 for B in self.base_points for P in B.preimages)

    def point(self, label: str) -> BasePoint:
        for B in self.base_points:
            if B.label == label:
                return B
        raise KeyError(label)

    def to_json(self):
        out = {
            "case": self.case_id,
            "p": self.p,
            "degrees": {"phi": self.degree, "q": self.deg_q, "psi": self.deg_psi},
            "psi_separable": self.psi_separable,
            "e": {"lower": self.e_lower, "upper": self.e_upper},
            "common_multiplicity": {"lower": self.m_lower, "upper": self.m_upper},
            "base_points": [B.to_json() for B in self.base_points],
            "psi": None if self.psi is None else self.psi.to_json(),
            "phi": _phi_json(self.phi),
            "notes": list(self.notes),
        }
        if self.bundle_check is not None:
            out["bundle_check"] = self.bundle_check
        if self.stages:
            out["stages"] = [s.to_json() for s in self.stages]
        return out


def _phi_json(phi):
    if phi is None:
        return None
    if isinstance(phi, SymbolicIsogeny):
        return {"kind": phi.kind, "degree": phi.degree, "separable": phi.separable,
                "dual_separable": phi.dual_separable, "symbolic": True}
    return {"kind": phi.kind, "degree": phi.degree, "separable": phi.separable,
            "dual_separable": phi.dual_separable, "domain": repr(phi.domain),
            "codomain": repr(phi.codomain)}


# --- checks ------------------------------------------------------------------------

def check_accounting(d: CoverDiagram) -> list[str]:
    """Violations of the multiplicity accounting and degree equalities."""
    bad = []
    if d.deg_psi != d.deg_q:
        bad.append(f"deg psi = {d.deg_psi} but deg q = {d.deg_q}")
    for B in d.base_points:
        es = [P.e for P in B.preimages]
        if sum(es) != d.deg_psi:
            bad.append(f"{B.label}: ramification indices sum to {sum(es)}, not deg psi = {d.deg_psi}")
        for P in B.preimages:
            if (P.m_up * P.e) % B.m:
                bad.append(f"{B.label}->{P.label}: m = {B.m} does not divide m'e = {P.m_up * P.e}")
        total = sum(Fraction(P.m_up * P.e, B.m) for P in B.preimages)
        if total > d.deg_q:
            bad.append(f"{B.label}: sum m'e/m = {total} exceeds deg q = {d.deg_q}")
        if B.m == 1 and any(P.m_up != 1 for P in B.preimages):
            bad.append(f"{B.label}: m = 1 below but a multiple fiber above")
        if B.m != 1 and any(P.e == 1 and P.m_up == 1 for P in B.preimages):
            bad.append(f"{B.label}: e = m' = 1 above a multiple fiber")
        for P in B.preimages:
            if P.e == 1 and (B.m > 1) != (P.m_up > 1):
                bad.append(f"{B.label}->{P.label}: unramified point, multiple below iff above fails")
    return bad


def wildness_transfer(d: CoverDiagram, base_point: str) -> str:
    """'tame', 'wild' or 'undetermined' for the lower fiber over ``base_point``."""
    B = d.point(base_point)
    if B.m == 1:
        return "undetermined"
    if d.p == 0 or B.m % d.p:
        return "tame"  # wild fibers have p | m
    if d.deg_q != 2:
        return "undetermined"
    P1 = B.preimages[0]
    if all(P.e == 1 for P in B.preimages) and len(B.preimages) == 2:
        if all(P.m_up == B.m for P in B.preimages):
            flags = {P.wild_up for P in B.preimages}
            if len(flags) == 1:
                return "wild" if flags.pop() else "tame"
        return "undetermined"
    if d.p == 2 and B.m == 2 and P1.e == 2:
        if P1.m_up == 1 and P1.restriction in ("separable", "iso"):
            return "wild"
        if P1.m_up == 2 and P1.restriction == "iso":
            return "wild"
    return "undetermined"


def hurwitz_check(psi_data: Union[PsiData, dict]) -> bool:
    """Riemann-Hurwitz for a separable psi: P^1 -> P^1, with wild contributions delta >= e."""
    if isinstance(psi_data, dict):
        psi_data = PsiData.from_json(psi_data)
    if not psi_data.separable:
        raise InseparableInput("Hurwitz formula needs a separable psi")
    n, p = psi_data.degree, psi_data.p
    total = 0
    for _, ram in psi_data.branch_points:
        if sum(e for e, _ in ram) > n:
            return False
        for e, delta in ram:
            if e < 1:
                return False
            wild = p > 0 and e % p == 0
            if wild and delta < e:
                return False
            if not wild and delta != e - 1:
                return False
            total += delta
    if total != 2 * n - 2:
        return False
    if n == 2:
        ramified = [ram for _, ram in psi_data.branch_points if any(e > 1 for e, _ in ram)]
        if p == 2:
            return len(ramified) == 1 and ramified[0] == ((2, 2),)
        return len(ramified) == 2 and all(r == ((2, 1),) for r in ramified)
    return True


def fiber_class_identity(d: CoverDiagram) -> bool:
    """m * q^*D = deg(psi) * m' * D' numerically; for e = -1 below this is q^*D = 2D'."""
    r = reduction_pullback_ratio(d.e_lower, d.e_upper, d.deg_q)
    ok = d.m_lower * r == d.deg_psi * d.m_upper
    if d.e_lower == -1 and d.e_upper == 0 and d.deg_q == 2:
        ok = ok and r == 2
    return ok


def psi_from_points(d_points: Sequence[BasePoint], degree: int, p: int) -> PsiData:
    """Branch data for a separable psi; the wild contribution is what Hurwitz leaves."""
    branch = []
    for B in d_points:
        ram = [P.e for P in B.preimages if P.e > 1]
        if ram:
            branch.append((B.label, ram))
    tame = sum(e - 1 for _, ram in branch for e in ram if not (p and e % p == 0))
    wild = [(lab, e) for lab, ram in branch for e in ram if p and e % p == 0]
    rest = 2 * degree - 2 - tame
    out = []
    for lab, ram in branch:
        pairs = []
        for e in ram:
            if p and e % p == 0:
                pairs.append((e, rest if len(wild) == 1 else e))
            else:
                pairs.append((e, e - 1))
        out.append((lab, tuple(pairs)))
    return PsiData(degree, p, True, tuple(out))


# --- composition -------------------------------------------------------------------

def compose_tower(lower: CoverDiagram, upper: CoverDiagram, case_id: str) -> CoverDiagram:
    """The square obtained by stacking ``upper`` on top of ``lower``."""
    by_label = {B.label: B for B in upper.base_points}
    points = []
    for B in lower.base_points:
        pre = []
        for P in B.preimages:
            if P.label in by_label:
                for R in by_label[P.label].preimages:
                    pre.append(replace(R, e=P.e * R.e, restriction=None))
            else:
                if P.m_up != 1:
                    raise InvalidInput(f"upper stage omits multiple fiber {P.label}")
                pre.extend(Preimage(f"{P.label}.{k}", P.e) for k in range(upper.deg_psi))
        points.append(replace(B, preimages=tuple(pre)))
    deg = lower.degree * upper.degree
    return CoverDiagram(
        case_id=case_id, p=lower.p, degree=deg,
        psi_separable=lower.psi_separable and upper.psi_separable,
        base_points=tuple(points), e_lower=lower.e_lower, e_upper=upper.e_upper,
        m_lower=lower.m_lower, m_upper=upper.m_upper,
        stages=(lower,) + (upper.stages or (upper,)),
    )


# --- builders ----------------------------------------------------------------------

def _symbolic(curve_data) -> bool:
    return isinstance(curve_data, SymbolicCurveHandle) or (
        isinstance(curve_data, tuple) and isinstance(curve_data[0], SymbolicCurveHandle)
    )


def _unpack(curve_data):
    if isinstance(curve_data, tuple):
        return curve_data[0], (curve_data[1] if len(curve_data) > 1 else None)
    return curve_data, None


def _info(curve) -> tuple[int, bool]:
    if isinstance(curve, SymbolicCurveHandle):
        return curve.p, bool(curve.ordinary)
    return curve.p, curve.ordinary


def _build_i2(curve_data) -> CoverDiagram:
    curve, L = _unpack(curve_data)
    p, ordinary = _info(curve)
    notes = []
    check = None
    if isinstance(curve, SymbolicCurveHandle):
        m = curve.line_order if L is None else L
        if not isinstance(m, int) or m < 2:
            raise UnsupportedCase("case i-2 needs a line bundle of finite order m > 1")
        phi = SymbolicIsogeny(m, p, separable=(p == 0 or m % p != 0), dual_separable=True,
                              kind="kill-line", kills=("L",))
    else:
        if L is None:
            raise InvalidInput("case i-2 needs the torsion point defining L")
        m = point_order(L)
        if m < 2:
            raise UnsupportedCase("L trivial: no multiple fibers")
        phi = kill_torsion_line(curve, L)
        check = {"kill": verify_killed(phi, L), "trivial": True}
    if p and m % p == 0:
        pn = p
        while pn < m:
            pn *= p
        if pn == m:
            if not ordinary:
                raise InvalidInput("p-power torsion line bundle on a supersingular curve")
            sep = False
            notes.append("m = p^n on ordinary E: phi, q and psi purely inseparable")
        else:
            sep = False
            notes.append("m divisible by p but not a power: psi inseparable, no branch data kept")
    else:
        sep = True
    pts = tuple(
        BasePoint(f"Q{i}", m, (Preimage(f"Q{i}'", m, 1, False,
                                        "inseparable" if not sep else "separable"),),
                  a=m - 1, wild=False)
        for i in (1, 2)
    )
    d = CoverDiagram("i-2", p, m, sep, pts, 0, 0, m, 1, phi=phi, bundle_check=check,
                     notes=tuple(notes))
    if sep:
        d.psi = psi_from_points(pts, m, p)
    return d


def _build_i5(curve_data) -> CoverDiagram:
    curve, _ = _unpack(curve_data)
    p, ordinary = _info(curve)
    if p == 0:
        raise UnsupportedCase("case i-4 (p = 0): no elliptic fibration to resolve")
    check = None
    if isinstance(curve, SymbolicCurveHandle):
        phi = SymbolicIsogeny(p, p, separable=ordinary, dual_separable=False, kind="verschiebung")
    else:
        phi = dual_isogeny(frobenius_isogeny(curve))
        pulled, _ = pullback_extending(AtiyahTriv(2), phi)
        check = {"pullback": repr(pulled), "trivial": pulled == direct_sum(O, O)}
    restriction = "separable" if ordinary else "inseparable"
    pts = (BasePoint("Q1", p, (Preimage("Q1'", p, 1, False, restriction),), a=p - 2, wild=True),)
    d = CoverDiagram("i-5", p, p, ordinary, pts, 0, 0, p, 1, phi=phi, bundle_check=check,
                     notes=("phi has purely inseparable dual",))
    if ordinary:
        d.psi = psi_from_points(pts, p, p)
    return d


def _separable_two_isogeny(E: Curve) -> Isogeny:
    """A separable degree-2 isogeny F -> E."""
    if E.p == 2:
        if not E.ordinary:
            raise UnsupportedCase("no separable degree-2 isogeny onto a supersingular curve in char 2")
        return dual_isogeny(frobenius_isogeny(E))
    Ej, T = find_point_of_order(E, 2)  # may live over an extension
    return dual_isogeny(velu_quotient(Ej, T))


def _build_e_minus_one_separable(case_id: str, curve_data) -> CoverDiagram:
    curve, Q = _unpack(curve_data)
    p, ordinary = _info(curve)
    check = None
    upper_data: object
    if isinstance(curve, SymbolicCurveHandle):
        phi = SymbolicIsogeny(2, p, separable=True, dual_separable=(p != 2), kind="degree-2")
        upper_data = SymbolicCurveHandle(p, curve.ordinary, 2)
    else:
        phi = _separable_two_isogeny(curve)
        Qpt = Q if Q is not None else curve.infinity
        if phi.codomain != curve:
            Qpt = Qpt.embed(phi.codomain)
        pulled, phi_used = pullback_extending(ExtQ(Qpt), phi)
        Q1, Q2 = [s.point for s in summands(pulled)]
        F = phi_used.domain
        Q1 = Q1 if Q1 is not None else F.infinity
        Q2 = Q2 if Q2 is not None else F.infinity
        Lpt = Q2 - Q1
        check = {"pullback": repr(pulled), "order_Q1_minus_Q2": point_order(Lpt),
                 "det_degree": 2, "field": repr(F.field)}
        upper_data = (F, Lpt)
    if p == 2:
        pts = (
            BasePoint("Q1", 2, (Preimage("Q1'", 2, 1, False, "separable"),), a=0, wild=True),
            BasePoint("Q2", 2, (Preimage("Q2'", 1, 2, False, "iso"), Preimage("Q2''", 1, 2, False, "iso")),
                      a=1, wild=False),
        )
    else:
        pts = (
            BasePoint("Q1", 2, (Preimage("Q1'", 2, 1, False, "separable"),), a=1, wild=False),
            BasePoint("Q2", 2, (Preimage("Q2'", 2, 1, False, "separable"),), a=1, wild=False),
            BasePoint("Q3", 2, (Preimage("Q3'", 1, 2, False, "iso"), Preimage("Q3''", 1, 2, False, "iso")),
                      a=1, wild=False),
        )
    stage1 = CoverDiagram(case_id, p, 2, True, pts, -1, 0, 2, 2, phi=phi, bundle_check=check,
                          psi=psi_from_points(pts, 2, p),
                          notes=("upper surface is P(O + L) with ord L = 2",))
    stage2 = _build_i2(upper_data)
    # relabel stage 2 so its base points are the upper multiple-fiber points of stage 1
    upper_pts = [P for B in pts for P in B.preimages if P.m_up > 1]
    stage2.base_points = tuple(
        replace(B, label=P.label, preimages=tuple(replace(R, label=P.label + "^") for R in B.preimages))
        for B, P in zip(stage2.base_points, upper_pts)
    )
    return compose_tower(stage1, stage2, case_id)


def _build_ii2(curve_data) -> CoverDiagram:
    curve, Q = _unpack(curve_data)
    p, ordinary = _info(curve)
    if p != 2 or ordinary:
        raise UnsupportedCase("case ii-2 needs a supersingular curve in characteristic 2")
    check = None
    if isinstance(curve, SymbolicCurveHandle):
        phi = SymbolicIsogeny(2, 2, separable=False, dual_separable=False, kind="frobenius")
        upper_data = SymbolicCurveHandle(2, False)
    else:
        E2 = curve.frobenius_twist(-1)
        phi = frobenius_isogeny(E2)
        assert phi.codomain == curve
        Qpt = Q if Q is not None else curve.infinity
        pulled, _ = pullback_extending(ExtQ(Qpt), phi)
        check = {"pullback": repr(pulled),
                 "shape": "E2,0 (x) O(Q')" if summands(pulled)[0].__class__.__name__ == "TensorLine"
                 else "unexpected"}
        upper_data = E2
    pts = (BasePoint("Q1", 2, (Preimage("Q'", 2, 2, True, "iso"),), a=1, wild=True),)
    stage1 = CoverDiagram("ii-2", 2, 2, False, pts, -1, 0, 2, 2, phi=phi, bundle_check=check,
                          notes=("phi, q and psi are Frobenius maps",))
    stage2 = _build_i5(upper_data)
    stage2.base_points = tuple(
        replace(B, label="Q'", preimages=tuple(replace(R, label="Q'^") for R in B.preimages))
        for B in stage2.base_points
    )
    return compose_tower(stage1, stage2, "ii-2")


def build_resolution(case_id: str, curve_data) -> CoverDiagram:
    """Resolution diagram for a row of the classification with multiple fibers.

    ``curve_data`` is a Curve or SymbolicCurveHandle, or a pair (curve, point):
    the torsion point defining L for i-2, the point Q of E_Q for the ii-* rows.
    """
    if case_id in ("i-1", "i-3", "i-4"):
        raise UnsupportedCase(f"{case_id} has no multiple fibers or no elliptic fibration")
    if case_id == "i-2":
        return _build_i2(curve_data)
    if case_id == "i-5":
        return _build_i5(curve_data)
    curve, _ = _unpack(curve_data)
    p, ordinary = _info(curve)
    if case_id == "ii-1":
        if p == 2:
            raise UnsupportedCase("ii-1 needs p != 2")
        return _build_e_minus_one_separable("ii-1", curve_data)
    if case_id == "ii-3":
        if p != 2 or not ordinary:
            raise UnsupportedCase("ii-3 needs an ordinary curve in characteristic 2")
        return _build_e_minus_one_separable("ii-3", curve_data)
    if case_id == "ii-2":
        return _build_ii2(curve_data)
    raise UnsupportedCase(f"unknown case {case_id!r}")


def stage_list(d: CoverDiagram) -> list[CoverDiagram]:
    return list(d.stages) if d.stages else [d]


def check_diagram(d: CoverDiagram, expected_wild: Optional[dict] = None) -> dict:
    """Every clause, per stage and for the composite: name -> bool."""
    out = {}
    for k, s in enumerate(stage_list(d) + ([d] if d.stages else [])):
        tag = f"stage{k + 1}" if s is not d else "composite"
        out[f"{tag}.accounting"] = not check_accounting(s)
        if s.psi is not None and s.psi_separable:
            out[f"{tag}.hurwitz"] = hurwitz_check(s.psi)
        out[f"{tag}.fiber_class_identity"] = fiber_class_identity(s)
        if s.bundle_check is not None and "trivial" in s.bundle_check:
            out[f"{tag}.pullback_trivial"] = bool(s.bundle_check["trivial"])
        if s.bundle_check is not None and "order_Q1_minus_Q2" in s.bundle_check:
            out[f"{tag}.order_two_difference"] = s.bundle_check["order_Q1_minus_Q2"] == 2
    out["top_row_trivial"] = d.top_row_trivial
    out["degrees_equal"] = d.deg_q == d.deg_psi == d.degree
    first = stage_list(d)[0]
    for B in first.base_points:
        verdict = wildness_transfer(first, B.label)
        if B.wild is not None and verdict != "undetermined":
            out[f"wildness.{B.label}"] = (verdict == "wild") == B.wild
        if expected_wild is not None and B.label in expected_wild and verdict != "undetermined":
            out[f"wildness_vs_table.{B.label}"] = (verdict == "wild") == expected_wild[B.label]
    return out
