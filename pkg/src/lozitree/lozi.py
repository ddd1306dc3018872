"""The Lozi map L(x, y) = (1 + y - a|x|, bx), its inverse and derived points.

All points live in Q(sqrt(D)) with D = a^2 + 4b, so the fixed points, the
triangle Delta and every pullback computed later are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DomainError, UsageError
from .geom2d import (
    BOUNDARY,
    INSIDE,
    QPoint,
    QPolygon,
    point_in_polygon,
    split_polyline_at_axis,
)
from .qfield import QScalar, as_rational, cmp_rational_vs_sqrt


@dataclass(frozen=True)
class LoziParams:
    """Parameters (a, b) with the exact derived points used throughout."""

    a: Fraction
    b: Fraction
    D: Fraction
    X: QPoint
    Y: QPoint
    Z: QPoint
    Z1: QPoint
    Z2: QPoint
    V0: QPoint
    delta: QPolygon = field(repr=False)

    def scalar(self, p=0, q=0) -> QScalar:
        return QScalar(p, q, self.D)

    def point(self, x, y) -> QPoint:
        if not isinstance(x, QScalar):
            x = QScalar(x, 0, self.D)
        if not isinstance(y, QScalar):
            y = QScalar(y, 0, self.D)
        return QPoint(x, y)

    @property
    def sqrtD(self) -> QScalar:
        return QScalar(0, 1, self.D)

    def forward(self, p: QPoint) -> QPoint:
        return forward(self, p)

    def inverse(self, p: QPoint) -> QPoint:
        return inverse(self, p)


def make_params(a, b) -> LoziParams:
    """Exact parameters from rationals (ints, Fractions or "p/q" strings).

    Requires 0 < b < 1 and a + b != 1, a - b != -1 so the closed forms exist.
    """
    a = as_rational(a)
    b = as_rational(b)
    if not (0 < b < 1):
        raise DomainError(f"derived points need 0 < b < 1, got b = {b}")
    if a + b == 1 or 1 + a - b == 0:
        raise DomainError("fixed-point formulas are singular for these parameters")
    D = a * a + 4 * b
    if D <= 0:
        raise DomainError("a^2 + 4b must be positive")
    s = QScalar(0, 1, D)
    one = QScalar(1, 0, D)
    r = 1 + a - b
    X = QPoint(one / r, one * (b / r))
    Y = QPoint(one * Fraction(-1) / (a + b - 1), one * (-b / (a + b - 1)))
    Z = QPoint((s + (2 + a)) / (2 * r), one * 0)
    V0 = QPoint(one * 0, ((2 * b - a) - s) / (2 * r))
    proto = _Proto(a, b, D)
    Z1 = forward(proto, Z)
    Z2 = forward(proto, Z1)
    try:
        delta = QPolygon([Z, Z1, Z2])
    except UsageError:
        raise DomainError("Z, L(Z), L^2(Z) are collinear; no triangle") from None
    return LoziParams(a=a, b=b, D=D, X=X, Y=Y, Z=Z, Z1=Z1, Z2=Z2, V0=V0, delta=delta)


@dataclass(frozen=True)
class _Proto:
    a: Fraction
    b: Fraction
    D: Fraction


def forward(params, p: QPoint) -> QPoint:
    """L(x, y) = (1 + y - a|x|, bx); the fold x = 0 takes |x| = 0."""
    x, y = p.x, p.y
    ax = x * params.a
    if x.sign() < 0:
        ax = -ax
    return QPoint(y - ax + 1, x * params.b)


def inverse(params, p: QPoint) -> QPoint:
    """L^-1(x, y) = (y/b, (a/b)|y| + x - 1)."""
    x, y = p.x, p.y
    ay = y * (params.a / params.b)
    if y.sign() < 0:
        ay = -ay
    return QPoint(y / params.b, ay + x - 1)


def forward_polyline(params, pl: Sequence[QPoint]) -> List[QPoint]:
    """Image of a polyline: split at x = 0, then map vertexwise."""
    return [forward(params, p) for p in split_polyline_at_axis(pl, "x=0")]


def inverse_polyline(params, pl: Sequence[QPoint]) -> List[QPoint]:
    """Preimage of a polyline: split at y = 0, then map vertexwise."""
    return [inverse(params, p) for p in split_polyline_at_axis(pl, "y=0")]


def iterate(params, p: QPoint, n: int) -> QPoint:
    f = forward if n >= 0 else inverse
    for _ in range(abs(n)):
        p = f(params, p)
    return p


def in_misiurewicz(a, b) -> bool:
    """Exact test of b > 0, a*sqrt(2) - b > 2, 2a + b < 4."""
    a = as_rational(a)
    b = as_rational(b)
    if not b > 0:
        return False
    if not 2 * a + b < 4:
        return False
    # a*sqrt(2) > 2 + b  <=>  sign((2 + b) - a*sqrt(2)) < 0
    return cmp_rational_vs_sqrt(2 + b, a, 2) < 0


def fixed_points(params) -> List[QPoint]:
    """Solve both affine branches; keep solutions lying in their branch's half-plane."""
    a, b, D = params.a, params.b, params.D
    out = []
    one = QScalar(1, 0, D)
    # x >= 0: x = 1 + bx - ax
    if 1 + a - b != 0:
        x = one / (1 + a - b)
        if x.sign() >= 0:
            out.append(QPoint(x, x * b))
    # x <= 0: x = 1 + bx + ax
    if 1 - a - b != 0:
        x = one / (1 - a - b)
        if x.sign() <= 0:
            p = QPoint(x, x * b)
            if p not in out:
                out.append(p)
    return out


@dataclass
class TrappingResult:
    ok: bool
    witness: Optional[QPoint] = None
    source: Optional[QPoint] = None

    def __bool__(self):
        return self.ok


def check_trapping(params) -> TrappingResult:
    """Exact test of L(Delta) inside Delta.

    Delta is cut by x = 0 into two convex pieces on which L is affine, so the
    image of each piece is the convex hull of its vertex images and Delta is
    convex: it suffices that every vertex image lies in the closed triangle.
    """
    verts = list(params.delta.vertices)
    ring = split_polyline_at_axis(verts + [verts[0]], "x=0")[:-1]
    for v in ring:
        w = forward(params, v)
        if point_in_polygon(w, params.delta) not in (INSIDE, BOUNDARY):
            return TrappingResult(False, witness=w, source=v)
    return TrappingResult(True)


def jacobian_det(params, p: QPoint) -> Fraction:
    """det DL = -b off the fold line."""
    if p.x.sign() == 0:
        raise DomainError("the derivative is undefined on the fold line x = 0")
    return -params.b


def eigen_right(params) -> Tuple[QScalar, QScalar]:
    """(lambda_s, lambda_u) of the x > 0 branch matrix [[-a, 1], [b, 0]]."""
    s = QScalar(0, 1, params.D)
    return ((s - params.a) / 2, (-s - params.a) / 2)


def eigen_left(params) -> Tuple[QScalar, QScalar]:
    """(lambda_s, lambda_u) of the x < 0 branch matrix [[a, 1], [b, 0]]."""
    s = QScalar(0, 1, params.D)
    return ((-s + params.a) / 2, (s + params.a) / 2)
