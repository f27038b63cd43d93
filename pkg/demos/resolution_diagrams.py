"""Build the isogeny-cover diagram that resolves each row with multiple fibers.

For every row the script prints the cover degree, the lower fibers with
their preimages upstairs, and the outcome of each consistency clause.

    python3 demos/resolution_diagrams.py
"""

from pathlib import Path

from ruledfib.bundles import SymbolicCurveHandle
from ruledfib.config import load_curve
from ruledfib.covers import build_resolution, check_diagram, stage_list

HERE = Path(__file__).parent / "curves"


def describe(case, data, where):
    d = build_resolution(case, data)
    clauses = check_diagram(d)
    verdict = "PASS" if all(clauses.values()) else "FAIL"
    print(f"{case} on {where}: degree {d.degree}, e {d.e_lower} -> {d.e_upper}, "
          f"psi {'separable' if d.psi_separable else 'inseparable'}  [{verdict}]")
    for k, s in enumerate(stage_list(d), 1):
        if d.stages:
            print(f"  stage {k}: degree {s.degree}, e {s.e_lower} -> {s.e_upper}")
        for B in s.base_points:
            ups = ", ".join(f"{P.label}(e={P.e}, m={P.m_up}{'*' if P.wild_up else ''})" for P in B.preimages)
            flag = "" if B.wild is None else (" wild" if B.wild else " tame")
            print(f"    {B.label}: m={B.m}{flag}  <-  {ups}")
    bad = [k for k, v in clauses.items() if not v]
    if bad:
        print("  failing clauses:", ", ".join(bad))
    print()


E5, pts5 = load_curve(HERE / "f5_cyclic4.json")
describe("i-2", (E5, pts5["P"]), "F_5, L of order 4")
describe("i-5", E5, "F_5")
describe("ii-1", E5, "F_5")

E3, _ = load_curve(HERE / "f3_ordinary.json")
describe("i-5", E3, "F_3 ordinary")

E2, _ = load_curve(HERE / "f2_supersingular.toml")
describe("ii-2", E2, "F_2 supersingular")

E4, _ = load_curve(HERE / "f4_ordinary.json")
describe("ii-3", E4, "F_4 ordinary")

describe("ii-1", SymbolicCurveHandle(0), "a symbolic curve in characteristic 0")
