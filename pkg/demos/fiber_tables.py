"""Admissible multiple-fiber configurations, grouped by family.

For each characteristic the script enumerates configurations on surfaces
with d = 0 and d = -1, then spot-checks a few Katsura-Ueno type lists.

    python3 demos/fiber_tables.py [max_m]
"""

import sys

from ruledfib.fibers import enumerate_configs, ku_feasible

M = int(sys.argv[1]) if len(sys.argv) > 1 else 8

for p in (0, 2, 3, 5):
    for d in (0, -1):
        if d == -1 and p == 0:
            continue
        en = enumerate_configs(d, p, M)
        print(f"p = {p}, d = {d}, multiplicities <= {M}")
        for fam, configs in en.families().items():
            shown = "  ".join("[" + " ".join(F.label() for F in c.fibers) + "]" for c in configs[:6])
            more = f"  (+{len(configs) - 6} more)" if len(configs) > 6 else ""
            print(f"  {fam or 'other':>5}: {shown}{more}")
        print()

print("Katsura-Ueno feasibility")
for types in ([(2, 2), (3, 3), (7, 7)], [(2, 2), (2, 2)], [(3, 3), (3, 3), (3, 3)], [(4, 2), (4, 4)]):
    r = ku_feasible(types)
    text = ", ".join(f"{m}|{nu}" for m, nu in types)
    print(f"  {text:<20} {'feasible' if r.feasible else 'infeasible'}")
