"""Exact Lozi-map manifolds, arc families and finite tree models, plus a numeric Hénon companion."""

from .errors import (
    ConstructionError,
    DomainError,
    InvariantViolation,
    LoziError,
    ResourceError,
    UsageError,
)
from .geom2d import QPoint, QPolygon, qpoint
from .lozi import LoziParams, check_trapping, forward, in_misiurewicz, inverse, make_params
from .qfield import QScalar, Rational

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "DomainError",
    "InvariantViolation",
    "LoziError",
    "LoziParams",
    "QPoint",
    "QPolygon",
    "QScalar",
    "Rational",
    "ResourceError",
    "UsageError",
    "check_trapping",
    "forward",
    "in_misiurewicz",
    "inverse",
    "make_params",
    "qpoint",
]
