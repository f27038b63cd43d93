"""Elliptic fibrations on P(E) for a normalized rank-2 bundle E on an elliptic curve.

Two independent paths produce a :class:`ClassificationResult`:

* :func:`classify` derives the answer from the bundle calculus, the fiber
  arithmetic, the lattice and the cover-diagram checks, and records each step;
* :func:`table_lookup` reads it off a hardcoded table.

:func:`cross_check` demands that they agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .bundles import (
    O,
    AtiyahTriv,
    ExtQ,
    SymbolicClass,
    SymbolicCurveHandle,
    SymbolicIsogeny,
    cohomology,
    direct_sum,
    kill_torsion_line,
    line,
    projective_normal_form,
    pullback,
    pullback_extending,
    summands,
    sym_power,
    verify_killed,
)
from .covers import (
    BasePoint,
    CoverDiagram,
    Preimage,
    check_accounting,
    hurwitz_check,
    psi_from_points,
    wildness_transfer,
)
from .elliptic_curve import Curve, CurvePoint, find_point_of_order, point_order
from .errors import (
    InvalidInput,
    UnknownOrder,
    UnreachableOverField,
)
from .fibers import (
    FiberConfig,
    MultipleFiber,
    enumerate_configs,
    kodaira_coefficient,
    validate_config,
)
from .isogeny import dual_isogeny, frobenius_isogeny, velu_quotient
from .lattice import minus_K_nef, normalized_bundle_menu, reduction_pullback_ratio

ROWS = ("i-1", "i-2", "i-3", "i-4", "i-5", "ii-1", "ii-2", "ii-3")
SHAPES = ("O+L", "E20", "EQ")
#: multiplicity bound for the candidate enumerations used inside derivations
DERIVATION_BOUND = 16


@dataclass(frozen=True)
class ClassificationInput:
    curve: Union[Curve, SymbolicCurveHandle]
    shape: str
    param: object = None  # torsion point for O+L, the point Q for EQ

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidInput(f"shape must be one of {SHAPES}, not {self.shape!r}")
        if isinstance(self.param, CurvePoint) and isinstance(self.curve, Curve):
            if self.param.curve != self.curve:
                raise InvalidInput("parameter point is not on the input curve")

    @property
    def symbolic(self) -> bool:
        return isinstance(self.curve, SymbolicCurveHandle)

    @property
    def p(self) -> int:
        return self.curve.p

    @property
    def ordinary(self) -> Optional[bool]:
        return self.curve.ordinary

    @property
    def e(self) -> int:
        return -1 if self.shape == "EQ" else 0

    def line_order(self):
        if self.shape != "O+L":
            return None
        if self.symbolic:
            if self.curve.line_order is None:
                raise UnknownOrder("symbolic O+L needs a line-bundle order")
            return self.curve.line_order
        if self.param is None:
            return 1
        return point_order(self.param)

    def bundle(self):
        if self.shape == "E20":
            return AtiyahTriv(2)
        if self.shape == "EQ":
            if self.symbolic:
                return ExtQ(SymbolicClass.named("Q"))
            return ExtQ(self.param if self.param is not None else self.curve.infinity)
        if self.symbolic:
            return direct_sum(O, line(self.curve.line_class()))
        return direct_sum(O, line(self.param))

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "shape": self.shape,
            "param": None if self.param is None else (
                self.param.to_json() if hasattr(self.param, "to_json") else self.param),
        }


@dataclass
class ClassificationResult:
    has_fibration: bool
    row_id: str
    fibers: tuple = ()  # (a, m, wild), sorted by (m, a, wild)
    e: int = 0
    p: int = 0
    derivation_trace: list = field(default_factory=list)
    symbolic: bool = False

    @property
    def strange(self) -> bool:
        return any(w and a == m - 1 for a, m, w in self.fibers)

    def key(self):
        return (self.has_fibration, self.row_id, self.fibers)

    def to_json(self, explain: bool = False):
        out = {
            "has_fibration": self.has_fibration,
            "row": self.row_id,
            "fibers": [{"a": a, "m": m, "wild": w} for a, m, w in self.fibers],
            "e": self.e,
            "p": self.p,
            "strange_type": self.strange,
            "symbolic_mode": self.symbolic,
        }
        if explain:
            out["derivation"] = self.derivation_trace
        return out


def _fibers(*triples) -> tuple:
    return tuple(sorted(triples, key=lambda t: (t[1], t[0], t[2])))


# --- table path --------------------------------------------------------------------

def table_lookup(inp: ClassificationInput) -> ClassificationResult:
    """Row match against the hardcoded classification table."""
    p = inp.p
    trace = [{"rule": "table", "anchor": "classification table", "detail": "direct lookup"}]
    if inp.shape == "O+L":
        o = inp.line_order()
        if o == 1:
            return ClassificationResult(True, "i-1", (), 0, p, trace, inp.symbolic)
        if o == math.inf:
            return ClassificationResult(False, "i-3", (), 0, p, trace, inp.symbolic)
        return ClassificationResult(True, "i-2", _fibers((o - 1, o, False), (o - 1, o, False)),
                                    0, p, trace, inp.symbolic)
    if inp.shape == "E20":
        if p == 0:
            return ClassificationResult(False, "i-4", (), 0, p, trace, inp.symbolic)
        return ClassificationResult(True, "i-5", _fibers((p - 2, p, True)), 0, p, trace, inp.symbolic)
    if p != 2:
        fibers = _fibers(*[(1, 2, False)] * 3)
        return ClassificationResult(True, "ii-1", fibers, -1, p, trace, inp.symbolic)
    if not inp.ordinary:
        return ClassificationResult(True, "ii-2", _fibers((1, 2, True)), -1, p, trace, inp.symbolic)
    return ClassificationResult(True, "ii-3", _fibers((1, 2, False), (0, 2, True)), -1, p, trace,
                                inp.symbolic)


# --- derivation path ---------------------------------------------------------------

class _Trace(list):
    def add(self, rule: str, anchor: str, detail):
        self.append({"rule": rule, "anchor": anchor, "detail": detail})


def _parity_candidates(e: int, p: int, trace: _Trace) -> dict:
    """Families whose Kodaira coefficient parity matches e (even iff e = 0)."""
    fams: dict = {}
    for d in (0, -1):
        if d == -1 and p == 0:
            continue
        M = max(DERIVATION_BOUND, p)
        for name, cs in enumerate_configs(d, p, M).families().items():
            fams.setdefault(name, []).extend(cs)
    keep = {}
    for name, cs in fams.items():
        parities = {kodaira_coefficient(c) % 2 for c in cs}
        assert len(parities) == 1, f"family {name} mixes parities"
        if (parities.pop() == 0) == (e == 0):
            keep[name] = cs
    trace.add("parity", "K_S = ((-2-d)m + sum a_i) D and e = K_S.C0 mod 2",
              {"e": e, "candidates": sorted(keep), "bound": max(DERIVATION_BOUND, p)})
    return keep


def _h0_sym_sequence(B, p: int, upto: int) -> list[int]:
    return [cohomology(sym_power(B, n, p))[0] for n in range(upto + 1)]


def _derive_decomposable(inp: ClassificationInput, trace: _Trace, cands: dict) -> ClassificationResult:
    p = inp.p
    o = inp.line_order()
    B = inp.bundle()
    if o == 1:
        seq = _h0_sym_sequence(B, p, 2)
        trace.add("h0 of Sym^n(O+O)", "Atiyah cohomology", {"h0": seq})
        trace.add("pencil |C0|", "h0(O(C0)) = 2 gives the projection to P^1", "no multiple fibers")
        if "I" not in cands:
            raise AssertionError("family I missing from the candidates")
        return ClassificationResult(True, "i-1", (), 0, p, trace, inp.symbolic)
    if o == math.inf:
        seq = _h0_sym_sequence(B, p, 2 * DERIVATION_BOUND)
        trace.add("h0 of Sym^n(O+L), ord L infinite", "Atiyah cohomology",
                  {"h0": seq, "checked_up_to": 2 * DERIVATION_BOUND})
        assert all(h == 1 for h in seq)
        trace.add("no pencil", "a fiber would be numerically m*C0 with h0(O(m*C0)) >= 2",
                  "h0(Sym^n) = 1 for all n, so no elliptic fibration")
        return ClassificationResult(False, "i-3", (), 0, p, trace, inp.symbolic)
    seq = _h0_sym_sequence(B, p, o)
    first = next(n for n, h in enumerate(seq) if h >= 2)
    trace.add("h0 of Sym^n(O+L)", "Atiyah cohomology: O+L+...+L^n",
              {"h0": seq, "first_pencil": first, "ord_L": o})
    m = first
    trace.add("multiple fiber m*C0", "fiber reduction D = C0 numerically when e = 0", {"m": m})
    trace.add("decomposable", "type (m, m) iff the bundle is decomposable", "family II")
    assert "II" in cands
    fibers = _fibers((m - 1, m, False), (m - 1, m, False))
    trace.add("tame", "d = 0 leaves no wild fibers", "a = m - 1")
    _existence_kill(inp, trace)
    return ClassificationResult(True, "i-2", fibers, 0, p, trace, inp.symbolic)


def _existence_kill(inp: ClassificationInput, trace: _Trace):
    if inp.symbolic:
        phi = SymbolicIsogeny(inp.line_order(), inp.p, separable=True, dual_separable=True,
                              kind="kill-line", kills=("L",))
        pulled = pullback(inp.bundle(), phi)
        trace.add("existence", "pull back along an isogeny killing L",
                  {"isogeny": "symbolic", "degree": phi.degree, "pullback": repr(pulled)})
        return
    phi = kill_torsion_line(inp.curve, inp.param)
    info = verify_killed(phi, inp.param)
    trace.add("existence", "pull back along the dual of the quotient by <L>",
              {"isogeny": repr(phi), "pullback": "O + O", "verified": info})


def _derive_atiyah(inp: ClassificationInput, trace: _Trace, cands: dict) -> ClassificationResult:
    p = inp.p
    if "I" in cands:
        h = cohomology(AtiyahTriv(2))[0]
        trace.add("exclude I", "h0(E2,0) = 1: C0 does not move", {"h0": h})
        cands.pop("I")
    if "II" in cands:
        trace.add("exclude II", "type (m, m) iff the bundle is decomposable", "E2,0 is indecomposable")
        cands.pop("II")
    if not cands:
        seq = _h0_sym_sequence(AtiyahTriv(2), p, DERIVATION_BOUND)
        trace.add("h0 of Sym^n E2,0", "Sym^n E2,0 = E(n+1),0 in characteristic 0",
                  {"h0": seq, "checked_up_to": DERIVATION_BOUND})
        return ClassificationResult(False, "i-4", (), 0, p, trace, inp.symbolic)
    assert set(cands) == {"V"}, cands
    seq = _h0_sym_sequence(AtiyahTriv(2), p, p)
    trace.add("h0 of Sym^n E2,0", "Sym^(p) E2,0 = O + E(p),0", {"h0": seq})
    # alpha from the accounting on the square over a degree-p phi with inseparable dual
    if inp.symbolic:
        phi = SymbolicIsogeny(p, p, separable=bool(inp.ordinary), dual_separable=False)
    else:
        phi = dual_isogeny(frobenius_isogeny(inp.curve))
    pulled = pullback(AtiyahTriv(2), phi)
    trace.add("existence", "E2,0 pulls back to O + O along phi of degree p with inseparable dual",
              {"isogeny": repr(phi), "pullback": repr(pulled)})
    alphas = []
    for c in cands["V"]:
        m = c.fibers[0].m
        d = CoverDiagram("i-5", p, p, bool(inp.ordinary),
                         (BasePoint("Q1", m, (Preimage("Q1'", p, 1),)),), 0, 0, m, 1)
        if not check_accounting(d):
            alphas.append(m)
    trace.add("alpha", "m | m'e with m' = 1 and e <= deg psi = p", {"surviving_m": alphas})
    assert alphas == [p]
    return ClassificationResult(True, "i-5", _fibers((p - 2, p, True)), 0, p, trace, inp.symbolic)


def _placements(lower: tuple, upper: tuple, p: int):
    """Consistent placements of the upper multiple fibers over a separable degree-2 psi."""
    n_branch = 1 if p == 2 else 2
    points = [("Q%d" % (i + 1), F) for i, F in enumerate(lower)] + [("G1", None), ("G2", None), ("G3", None)]
    for branched in itertools.product((False, True), repeat=len(points)):
        if sum(branched) != n_branch:
            continue
        slots = []
        for (lab, F), br in zip(points, branched):
            if br:
                slots.append((lab, 0))
            else:
                slots.extend([(lab, 0), (lab, 1)])
        for chosen in itertools.permutations(range(len(slots)), len(upper)):
            where = {slots[s]: upper[k] for k, s in enumerate(chosen)}
            bps = []
            for (lab, F), br in zip(points, branched):
                m = F.m if F else 1
                pre = []
                for k in range(1 if br else 2):
                    U = where.get((lab, k))
                    pre.append(Preimage(f"{lab}'{k}", 2 if br else 1, U.m if U else 1,
                                        bool(U and U.wild), None if br else "iso"))
                bps.append(BasePoint(lab, m, tuple(pre), F.a if F else None, F.wild if F else None))
            d = CoverDiagram("placement", p, 2, True, tuple(bps), -1, 0, 2, 2)
            if check_accounting(d) or not hurwitz_check(psi_from_points(bps, 2, p)):
                continue
            if any(
                B.wild is not None and (v := wildness_transfer(d, B.label)) != "undetermined"
                and (v == "wild") != B.wild
                for B in bps
            ):
                continue
            yield d


def _derive_eq(inp: ClassificationInput, trace: _Trace, cands: dict) -> ClassificationResult:
    p = inp.p
    trace.add("fibration exists", "-K is nef and semi-ample for e = -1", "S has an elliptic fibration")
    if p and inp.ordinary is False:
        for name in list(cands):
            if any(validate_config(FiberConfig(c.d, c.fibers, p, supersingular=True)) for c in cands[name]):
                if all(validate_config(FiberConfig(c.d, c.fibers, p, supersingular=True)) for c in cands[name]):
                    trace.add(f"exclude {name}", "supersingular reduction: tame iff p does not divide m",
                              [f.label() for f in cands[name][0].fibers])
                    cands.pop(name)
    if p == 2 and inp.ordinary is False:
        assert set(cands) == {"IV"}, cands
        upper, phi = _upper_frobenius(inp, trace)
        m_up = upper.fibers[0][1]
        r = reduction_pullback_ratio(-1, 0, 2)
        surviving = [c.fibers[0].m for c in cands["IV"] if c.fibers[0].m * r == 2 * m_up]
        trace.add("alpha", "q*D = 2D' and m q*D = deg(psi) m' D'",
                  {"ratio": str(r), "upper_m": m_up, "surviving_m": surviving})
        assert surviving == [2]
        return ClassificationResult(True, "ii-2", _fibers((1, 2, True)), -1, p, trace, inp.symbolic)
    upper, phi = _upper_separable(inp, trace)
    up_fibers = tuple(MultipleFiber(m, a, m, w) for a, m, w in upper.fibers)
    survivors = {}
    for name, cs in cands.items():
        ok = [c for c in cs if next(_placements(c.fibers, up_fibers, p), None) is not None]
        trace.add(f"placement {name}", "accounting, Hurwitz branch count, wildness transfer",
                  {"members": len(cs), "consistent": len(ok)})
        if ok:
            survivors[name] = ok
    if p != 2:
        assert set(survivors) == {"III"}, survivors
        trace.add("tame", "d = 0 for (2,2,2): no wild fibers", "recorded as tame")
        return ClassificationResult(True, "ii-1", _fibers(*[(1, 2, False)] * 3), -1, p, trace,
                                    inp.symbolic)
    assert set(survivors) == {"VI"}, survivors
    return ClassificationResult(True, "ii-3", _fibers((1, 2, False), (0, 2, True)), -1, p, trace,
                                inp.symbolic)


def _upper_separable(inp: ClassificationInput, trace: _Trace):
    p = inp.p
    if inp.symbolic:
        phi = SymbolicIsogeny(2, p, separable=True, dual_separable=(p != 2), kind="degree-2")
        pulled = pullback(inp.bundle(), phi)
        up_inp = ClassificationInput(SymbolicCurveHandle(p, inp.ordinary, 2), "O+L")
    else:
        E = inp.curve
        if p == 2:
            phi = dual_isogeny(frobenius_isogeny(E))
        else:
            Ej, T = find_point_of_order(E, 2)
            phi = dual_isogeny(velu_quotient(Ej, T))
        B = inp.bundle()
        if phi.codomain != E:
            B = ExtQ(B.point.embed(phi.codomain))
        pulled, phi = pullback_extending(B, phi)
        Q1, Q2 = [s.point or phi.domain.infinity for s in summands(pulled)]
        up_inp = ClassificationInput(phi.domain, "O+L", Q2 - Q1)
    normal, e_up = projective_normal_form(pulled)
    trace.add("pullback E_Q", "separable degree-2 isogeny: O(Q1) + O(Q2), ord(Q1 - Q2) = 2",
              {"isogeny": repr(phi), "pullback": repr(pulled), "normal_form": repr(normal), "e": e_up})
    upper = classify(up_inp)
    trace.add("upper surface", "classified recursively", upper.to_json())
    return upper, phi


def _upper_frobenius(inp: ClassificationInput, trace: _Trace):
    if inp.symbolic:
        phi = SymbolicIsogeny(2, 2, separable=False, dual_separable=False, kind="frobenius")
        pulled = pullback(inp.bundle(), phi)
        up_inp = ClassificationInput(SymbolicCurveHandle(2, False), "E20")
    else:
        phi = frobenius_isogeny(inp.curve.frobenius_twist(-1))
        pulled, phi = pullback_extending(inp.bundle(), phi)
        up_inp = ClassificationInput(phi.domain, "E20")
    normal, e_up = projective_normal_form(pulled)
    trace.add("pullback E_Q", "Frobenius in characteristic 2: E2,0 (x) O(Q')",
              {"isogeny": repr(phi), "pullback": repr(pulled), "normal_form": repr(normal), "e": e_up})
    upper = classify(up_inp)
    trace.add("upper surface", "classified recursively", upper.to_json())
    return upper, phi


def _postchecks(res: ClassificationResult, inp: ClassificationInput, trace: _Trace):
    if not res.has_fibration:
        return
    fibers = tuple(MultipleFiber(m, a, 1 if w else m, w) for a, m, w in res.fibers)
    wild = sum(w for _, _, w in res.fibers)
    cfg = FiberConfig(-wild, fibers, res.p, supersingular=(inp.ordinary is False) if res.p else None)
    bad = validate_config(cfg)
    parity = kodaira_coefficient(cfg) % 2 == 0
    trace.add("post-check", "configuration constraints and e parity",
              {"violations": bad, "even_coefficient": parity, "e": res.e})
    assert not bad, bad
    assert parity == (res.e == 0)


def classify(inp: ClassificationInput, concrete: bool = False) -> ClassificationResult:
    """Derive the fibration data for P(E).

    With ``concrete=True`` a symbolic input that cannot be realised over a
    finite field raises UnreachableOverField carrying the symbolic answer.
    """
    trace = _Trace()
    e = inp.e
    p = inp.p
    trace.add("input", "normalized bundle", inp.to_json())
    menu = [s["shape"] for s in normalized_bundle_menu(e, p)]
    assert inp.shape in menu
    trace.add("e", "-K nef iff e in {0, -1}", {"e": e, "nef": minus_K_nef(e), "menu": menu})
    cands = _parity_candidates(e, p, trace)
    if inp.shape == "O+L":
        res = _derive_decomposable(inp, trace, cands)
    elif inp.shape == "E20":
        res = _derive_atiyah(inp, trace, cands)
    else:
        res = _derive_eq(inp, trace, cands)
    _postchecks(res, inp, trace)
    if concrete and inp.symbolic and (p == 0 or res.row_id == "i-3"):
        raise UnreachableOverField(f"row {res.row_id} needs p = 0 or a line bundle of infinite order",
                                   result=res)
    return res


def cross_check(inp: ClassificationInput) -> bool:
    return classify(inp).key() == table_lookup(inp).key()
