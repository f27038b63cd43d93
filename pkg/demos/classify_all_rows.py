"""Walk the demo curves through every bundle shape and print the verdicts.

Run from the repository root:  python3 demos/classify_all_rows.py
"""

from pathlib import Path

from ruledfib import ClassificationInput, classify, table_lookup
from ruledfib.config import load_curve
from ruledfib.bundles import SymbolicCurveHandle
from ruledfib.errors import RuledFibError

HERE = Path(__file__).parent / "curves"


def show(label, inp):
    try:
        r = classify(inp)
    except RuledFibError as exc:
        print(f"  {label:<28} {type(exc).__name__}: {exc}")
        return
    fibers = ", ".join(f"{a}/{m}{'*' if w else ''}" for a, m, w in r.fibers) or "-"
    agree = "agrees" if table_lookup(inp).key() == r.key() else "DISAGREES"
    print(f"  {label:<28} row={r.row_id or 'none':<5} fibers=[{fibers}] ({agree} with table)")


for path in sorted(HERE.glob("f*.*")):
    E, pts = load_curve(path)
    kind = "supersingular" if E.supersingular else "ordinary"
    print(f"{path.name}: {E.field}, #E = {E.order}, {kind}")
    show("E20 (Atiyah bundle)", ClassificationInput(E, "E20"))
    show("EQ, Q = origin", ClassificationInput(E, "EQ", E.infinity))
    for n in range(2, 7):
        for P in E.points_of_order(n)[:1]:
            show(f"O+L, L of order {n}", ClassificationInput(E, "O+L", P))
    print()

print("symbolic inputs")
for p in (0, 2, 3, 5):
    for ordinary in ((None,) if p == 0 else (True, False)):
        tag = "" if p == 0 else (" ordinary" if ordinary else " supersingular")
        handle = SymbolicCurveHandle(p, ordinary, None)
        show(f"E20, char {p}{tag}", ClassificationInput(handle, "E20"))
        show(f"EQ, char {p}{tag}", ClassificationInput(handle, "EQ"))
    show(f"O+L, char {p}, L non-torsion", ClassificationInput(SymbolicCurveHandle(p, True if p else None, float("inf")), "O+L"))
