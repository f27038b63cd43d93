"""Curve configuration files (JSON, or TOML normalized to the same dict).

Schema::

    {
      "field": {"p": 5, "k": 1},
      "a1": 0, "a2": 0, "a3": 0, "a4": 1, "a6": 0,
      "points": {"P": [2, 0], "T": {"order": 4}, "Z": null}
    }

Coefficients and coordinates are integers (prime fields) or little-endian
coefficient arrays. A point is ``[x, y]``, ``null`` for the point at
infinity, or ``{"order": n}`` for the least rational point of order n.
"""

from __future__ import annotations

import json
from pathlib import Path

import tomli

from .elliptic_curve import Curve, CurvePoint, curve_from_json
from .errors import InvalidInput, NeedsFieldExtension
from .finite_field import element_from_json

CURVE_KEYS = {"field", "a1", "a2", "a3", "a4", "a6", "points"}


def load_config(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        return tomli.loads(text)
    return json.loads(text)


def validate_curve_config(obj: dict) -> None:
    if not isinstance(obj, dict):
        raise InvalidInput("curve config must be an object")
    extra = set(obj) - CURVE_KEYS
    if extra:
        raise InvalidInput(f"unknown curve config keys: {sorted(extra)}")
    fld = obj.get("field")
    if not isinstance(fld, dict) or "p" not in fld:
        raise InvalidInput('curve config needs "field": {"p": ..., "k": ...}')
    pts = obj.get("points", {})
    if not isinstance(pts, dict):
        raise InvalidInput('"points" must map names to points')


def resolve_point(E: Curve, spec) -> CurvePoint:
    if spec is None or spec == "O":
        return E.infinity
    if isinstance(spec, dict):
        if set(spec) != {"order"}:
            raise InvalidInput(f"bad point spec {spec!r}")
        n = int(spec["order"])
        pts = sorted(E.points_of_order(n), key=CurvePoint.sort_key)
        if not pts:
            raise NeedsFieldExtension(f"no rational point of order {n} on {E}")
        return pts[0]
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        F = E.field
        return E.point(element_from_json(F, spec[0]), element_from_json(F, spec[1]))
    raise InvalidInput(f"bad point spec {spec!r}")


def curve_from_config(obj: dict) -> tuple[Curve, dict]:
    """(curve, named points) from a parsed config."""
    validate_curve_config(obj)
    E = curve_from_json({k: v for k, v in obj.items() if k != "points"})
    points = {name: resolve_point(E, spec) for name, spec in sorted(obj.get("points", {}).items())}
    return E, points


def load_curve(path) -> tuple[Curve, dict]:
    return curve_from_config(load_config(path))
