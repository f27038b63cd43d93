"""ruledfib command line.

Exit codes: 0 success or PASS, 1 FAIL or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor

from .bundles import SymbolicCurveHandle
from .classifier import ClassificationInput, classify, table_lookup
from .cocycle import (
    conjugation_difference,
    is_zero_matrix,
    matrix_to_json,
    verify_block_structure,
    verify_cocycle_condition,
)
from .config import load_config, curve_from_config
from .covers import build_resolution, check_diagram
from .errors import NeedsFieldExtension, RuledFibError, UnreachableOverField
from .fibers import enumerate_configs, ku_feasible
from .lattice import canonical_class, fiber_reduction_class, intersect, normalized_bundle_menu, section

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def _emit(obj, fmt: str):
    if fmt == "text" and isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            print(f"{k}: {v if not isinstance(v, (dict, list)) else json.dumps(v, sort_keys=True, default=str)}")
    else:
        print(dumps(obj))


# --- input assembly ----------------------------------------------------------------

_BUNDLE_RE = re.compile(r"^(O\+O|O\+L(?:\((\w+)\))?|E20|E2,0|EQ(?:\((\w+)\))?)$")


def _split_bundle(spec: str):
    s = spec.replace(" ", "")
    m = _BUNDLE_RE.match(s)
    if not m:
        raise UsageError(f"cannot parse bundle spec {spec!r}; expected O+O, O+L(P), E20 or EQ(Q)")
    if s == "O+O":
        return "O+L", None, True
    if s.startswith("O+L"):
        return "O+L", m.group(2), False
    if s.startswith("E2"):
        return "E20", None, False
    return "EQ", m.group(3), False


def _parse_order(text):
    if text is None:
        return None
    if str(text).lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"--order must be a positive integer or 'inf', not {text!r}")


def build_input(curve_cfg=None, bundle: str = "", p=None, symbolic=False, ordinary=None,
                order=None) -> ClassificationInput:
    shape, name, trivial = _split_bundle(bundle)
    if symbolic or curve_cfg is None:
        if p is None:
            raise UsageError("symbolic mode needs --p")
        if p and ordinary is None:
            raise UsageError("symbolic mode with p > 0 needs --ordinary or --supersingular")
        if shape == "O+L":
            o = 1 if trivial else order
            if o is None:
                raise UsageError("symbolic O+L needs --order (an integer or 'inf')")
        else:
            o = None
        handle = SymbolicCurveHandle(p, None if p == 0 else ordinary, o)
        return ClassificationInput(handle, shape)
    E, points = curve_from_config(curve_cfg)
    if p is not None and p != E.p:
        raise UsageError(f"--p {p} disagrees with the curve characteristic {E.p}")
    param = None
    if name is not None:
        if name not in points:
            raise UsageError(f"point {name!r} not defined in the curve config (known: {sorted(points)})")
        param = points[name]
    return ClassificationInput(E, shape, param)


def _lattice_report(e: int) -> dict:
    K = canonical_class(e)
    D = fiber_reduction_class(e)
    return {
        "e": e,
        "C0^2": intersect(section(e), section(e)),
        "K": K.to_json(),
        "K^2": intersect(K, K),
        "K.C0": intersect(K, section(e)),
        "fiber_reduction_D": D.to_json(),
        "normalized_shapes": [s["shape"] for s in normalized_bundle_menu(e)],
    }


def classify_report(inp: ClassificationInput, explain: bool = False) -> dict:
    note = None
    try:
        res = classify(inp, concrete=not inp.symbolic)
    except UnreachableOverField as exc:
        res = exc.result
        note = str(exc)
    out = res.to_json(explain=explain)
    out["mode"] = "symbolic" if inp.symbolic else "concrete"
    out["agrees_with_table"] = res.key() == table_lookup(inp).key()
    if inp.symbolic and (inp.p == 0 or res.row_id == "i-3"):
        out["note"] = note or "symbolic mode: not realizable over a finite field"
    if explain:
        out["lattice"] = _lattice_report(res.e)
    return out


def _batch_item(item: dict) -> dict:
    try:
        cfg = item.get("curve")
        if isinstance(cfg, str):
            cfg = load_config(cfg)
        inp = build_input(cfg, item["bundle"], item.get("p"), item.get("symbolic", False),
                          item.get("ordinary"), _parse_order(item.get("order")))
        return classify_report(inp, bool(item.get("explain", False)))
    except (RuledFibError, UsageError, KeyError) as exc:
        return {"error": type(exc).__name__, "message": str(exc)}


# --- subcommands -------------------------------------------------------------------

def cmd_curve_info(args) -> int:
    E, points = curve_from_config(load_config(args.curve))
    torsion = {str(n): len(E.torsion(n)) for n in range(2, args.max_torsion + 1)}
    _emit({
        "curve": E.to_json(),
        "field": repr(E.field),
        "count": E.order,
        "trace": E.trace,
        "supersingular": E.supersingular,
        "j_invariant": list(E.j_invariant.coeffs),
        "group_structure": list(E.group_structure()),
        "rational_torsion_sizes": torsion,
        "points": {k: v.to_json() for k, v in points.items()},
    }, args.format)
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.batch:
        items = load_config(args.batch)
        if not isinstance(items, list):
            raise UsageError("--batch file must hold a list of inputs")
        with ProcessPoolExecutor() as pool:
            reports = list(pool.map(_batch_item, items))
        _emit({"results": [dict(r, index=i) for i, r in enumerate(reports)]}, "json")
        return EXIT_FAIL if any("error" in r for r in reports) else EXIT_OK
    if not args.bundle:
        raise UsageError("classify needs --bundle (or --batch)")
    cfg = load_config(args.curve) if args.curve else None
    ordinary = True if args.ordinary else (False if args.supersingular else None)
    inp = build_input(cfg, args.bundle, args.p, args.symbolic, ordinary, _parse_order(args.order))
    _emit(classify_report(inp, args.explain), args.format)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    _emit(enumerate_configs(args.d, args.p, args.max_m).to_json(), args.format)
    return EXIT_OK


def parse_types(text: str) -> list[tuple[int, int]]:
    """Fiber types from "m|nu,m|nu,..." or "m1,m2,...|nu1,nu2,..."."""
    s = text.replace(" ", "")
    try:
        if s.count("|") == 1:
            left, right = s.split("|")
            ms = [int(x) for x in left.split(",")]
            nus = [int(x) for x in right.split(",")]
            if len(ms) != len(nus):
                raise UsageError(f"--type {text!r}: {len(ms)} multiplicities but {len(nus)} nu values")
            return list(zip(ms, nus))
        out = []
        for tok in s.split(","):
            m, nu = tok.split("|")
            out.append((int(m), int(nu)))
        return out
    except ValueError:
        raise UsageError(f"cannot parse --type {text!r}; use \"m|nu,m|nu\" or \"m1,m2|nu1,nu2\"")


def cmd_ku(args) -> int:
    types = parse_types(args.type)
    res = ku_feasible(types)
    _emit(dict(res.to_json(), types=[list(t) for t in types], result=res.feasible), args.format)
    return EXIT_OK


def cmd_sym_split(args) -> int:
    diff = conjugation_difference(args.p, args.mode)
    ok = is_zero_matrix(diff)
    block = verify_block_structure(args.p)
    cocycle = all(verify_cocycle_condition(args.p, m) for m in range(args.p + 1))
    report = {"p": args.p, "mode": args.mode, "conjugation": ok, "block_structure": block,
              "cocycle_condition": cocycle,
              "result": "PASS" if ok and block and cocycle else "FAIL"}
    if not ok:
        report["difference"] = matrix_to_json(diff)
    if args.format == "text":
        print(report["result"])
        if not ok:
            print(dumps(report["difference"]))
    else:
        _emit(report, "json")
    return EXIT_OK if report["result"] == "PASS" else EXIT_FAIL


def cmd_cover_check(args) -> int:
    if args.curve:
        E, points = curve_from_config(load_config(args.curve))
        data = E
        if args.point:
            if args.point not in points:
                raise UsageError(f"point {args.point!r} not defined in the curve config")
            data = (E, points[args.point])
    else:
        if args.p is None:
            raise UsageError("cover-check needs --curve or --p with --symbolic flags")
        ordinary = True if args.ordinary else (False if args.supersingular else None)
        data = SymbolicCurveHandle(args.p, None if args.p == 0 else ordinary, _parse_order(args.order))
    d = build_resolution(args.case, data)
    clauses = check_diagram(d)
    report = {"diagram": d.to_json(),
              "clauses": {k: ("PASS" if v else "FAIL") for k, v in clauses.items()},
              "result": "PASS" if all(clauses.values()) else "FAIL"}
    _emit(report, args.format)
    return EXIT_OK if all(clauses.values()) else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all()
    for r in results:
        print(r.line())
    if args.json:
        print(dumps([r.to_json() for r in results]))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ruledfib", description="Elliptic fibrations on elliptic ruled surfaces.")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--max-field", type=int, help="field-size cap (overrides RULEDFIB_MAX_FIELD)")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    curve = sub.add_parser("curve", help="curve inspection")
    csub = curve.add_subparsers(dest="curve_command", parser_class=_Parser)
    csub.required = True
    info = csub.add_parser("info", parents=[common], help="point count, trace, supersingularity, group structure")
    info.add_argument("--curve", required=True)
    info.add_argument("--max-torsion", type=int, default=6)
    info.set_defaults(func=cmd_curve_info)

    def symbolic_flags(p):
        p.add_argument("--p", type=int)
        p.add_argument("--symbolic", action="store_true")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--ordinary", action="store_true")
        g.add_argument("--supersingular", action="store_true")
        p.add_argument("--order", help="order of L for symbolic O+L: integer or 'inf'")

    cl = sub.add_parser("classify", help="classify elliptic fibrations on P(E)")
    cl.add_argument("--curve")
    cl.add_argument("--bundle", help='"O+O", "O+L(P)", "E20" or "EQ(Q)"')
    cl.add_argument("--explain", action="store_true")
    cl.add_argument("--batch", help="JSON/TOML list of inputs, classified in parallel")
    symbolic_flags(cl)
    cl.set_defaults(func=cmd_classify)

    en = sub.add_parser("enumerate-fibers", help="admissible multiple-fiber configurations")
    en.add_argument("--d", type=int, required=True)
    en.add_argument("--p", type=int, required=True)
    en.add_argument("--max-m", type=int, default=60)
    en.set_defaults(func=cmd_enumerate)

    ku = sub.add_parser("ku-check", help="Katsura-Ueno feasibility")
    ku.add_argument("--type", required=True, help='"m|nu,m|nu,..." or "m1,m2|nu1,nu2"')
    ku.set_defaults(func=cmd_ku)

    ss = sub.add_parser("sym-split", help="verify the Sym^p E2,0 splitting identities")
    ss.add_argument("--p", type=int, required=True)
    ss.add_argument("--mode", choices=("ordinary", "supersingular"), required=True)
    ss.set_defaults(func=cmd_sym_split)

    cc = sub.add_parser("cover-check", help="build and check a resolution diagram")
    cc.add_argument("--case", required=True, choices=("i-2", "i-5", "ii-1", "ii-2", "ii-3"))
    cc.add_argument("--curve")
    cc.add_argument("--point", help="named point: L for i-2, Q for the ii rows")
    symbolic_flags(cc)
    cc.set_defaults(func=cmd_cover_check)

    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--json", action="store_true")
    st.set_defaults(func=cmd_selftest)
    return ap


def run(argv=None) -> int:
    saved = os.environ.get("RULEDFIB_MAX_FIELD")
    try:
        return _run(argv)
    finally:
        if saved is None:
            os.environ.pop("RULEDFIB_MAX_FIELD", None)
        else:
            os.environ["RULEDFIB_MAX_FIELD"] = saved


def _run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.max_field is not None:
            os.environ["RULEDFIB_MAX_FIELD"] = str(args.max_field)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NeedsFieldExtension as exc:
        print(dumps({"error": "NeedsFieldExtension", "message": f"unreachable at this field size: {exc}",
                     "degree": exc.degree}), file=sys.stderr)
        return EXIT_FAIL
    except RuledFibError as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_FAIL
    except (OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
