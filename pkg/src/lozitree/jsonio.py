"""Canonical JSON encoding: exact values as strings, floats only under *_approx keys."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .geom2d import QPoint
from .qfield import QScalar, format_rational

SCHEMA = 1


def point(p: QPoint) -> list:
    return [p.x.to_text(), p.y.to_text()]


def point_approx(p: QPoint) -> list:
    return [_float(v) for v in p.approx()]


def polyline(pts) -> list:
    return [point(p) for p in pts]


def polyline_approx(pts) -> list:
    return [point_approx(p) for p in pts]


def _float(v) -> float:
    # fixed significant digits keep output byte-stable across platforms
    return float(f"{float(v):.12g}")


def jsonable(obj: Any) -> Any:
    """Convert exact and numpy values recursively; used for witnesses and records."""
    if isinstance(obj, QPoint):
        return point(obj)
    if isinstance(obj, QScalar):
        return obj.to_text()
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return _float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def parse_point(pair, D) -> QPoint:
    return QPoint(QScalar.from_text(pair[0], D), QScalar.from_text(pair[1], D))


def parse_polyline(items, D) -> list:
    return [parse_point(p, D) for p in items]
