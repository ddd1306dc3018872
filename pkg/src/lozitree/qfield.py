"""Exact arithmetic in Q and in a real quadratic field Q(sqrt(D)).

Rationals are plain :class:`fractions.Fraction` values.  A :class:`QScalar`
holds ``p + q*sqrt(D)`` with rational ``p``, ``q`` and a radicand ``D`` that is
shared by every value taking part in one computation.  Signs are decided
exactly, so every geometric predicate built on top of this module is exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DomainError, UsageError

Rational = Fraction

__all__ = [
    "Rational",
    "QScalar",
    "as_rational",
    "parse_rational",
    "format_rational",
    "rational_sqrt",
    "qs_add",
    "qs_sub",
    "qs_mul",
    "qs_neg",
    "qs_inv",
    "qs_sign",
    "cmp_rational_vs_sqrt",
    "sign",
]


def sign(x) -> int:
    return (x > 0) - (x < 0)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction (floats rejected)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise UsageError(f"cannot use {value!r} as an exact rational")


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Decimal notation is refused on purpose."""
    m = _RAT_RE.match(text)
    if not m:
        raise UsageError(f"not a rational of the form p/q: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise UsageError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(r: Fraction) -> str:
    """Canonical text form, always ``p/q`` with ``q >= 1``."""
    r = as_rational(r)
    return f"{r.numerator}/{r.denominator}"


def rational_sqrt(r: Fraction):
    """Exact square root of a non-negative rational, or None if irrational."""
    r = as_rational(r)
    if r < 0:
        return None
    n, d = r.numerator, r.denominator
    sn, sd = math.isqrt(n), math.isqrt(d)
    if sn * sn == n and sd * sd == d:
        return Fraction(sn, sd)
    return None


def _sign_p_plus_q_sqrt(p: Fraction, q: Fraction, D: Fraction) -> int:
    sp, sq = sign(p), sign(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: compare p^2 with q^2 D
    c = p * p - q * q * D
    if c > 0:
        return sp
    if c < 0:
        return sq
    return 0


class QScalar:
    """The real number ``p + q*sqrt(D)``; immutable and hashable.

    Values with different radicands never mix.  If ``D`` is the square of a
    rational the value is folded into ``p`` so equality stays componentwise.
    """

    __slots__ = ("p", "q", "D")

    def __init__(self, p=0, q=0, D=1):
        p = as_rational(p)
        q = as_rational(q)
        D = as_rational(D)
        if D <= 0:
            raise DomainError(f"radicand must be positive, got {D}")
        if q:
            root = _square_root_cache(D)
            if root is not None:
                p, q = p + q * root, Fraction(0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", D)

    @classmethod
    def _raw(cls, p: Fraction, q: Fraction, D: Fraction) -> "QScalar":
        # trusted constructor: p, q, D already canonical
        obj = object.__new__(cls)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "D", D)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("QScalar is immutable")

    def __reduce__(self):
        return (QScalar, (self.p, self.q, self.D))

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> "QScalar":
        if isinstance(other, QScalar):
            if other.D != self.D:
                raise UsageError(f"mixed radicands {self.D} and {other.D}")
            return other
        if isinstance(other, (int, Fraction)):
            return QScalar._raw(Fraction(other), Fraction(0), self.D)
        return NotImplemented

    def normalized(self) -> "QScalar":
        return QScalar(self.p, self.q, self.D)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QScalar._raw(self.p + o.p, self.q + o.q, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QScalar._raw(self.p - o.p, self.q - o.q, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QScalar._raw(self.p * other, self.q * other, self.D)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p1, q1, p2, q2 = self.p, self.q, o.p, o.q
        if not q1:
            return QScalar._raw(p1 * p2, p1 * q2, self.D)
        if not q2:
            return QScalar._raw(p1 * p2, q1 * p2, self.D)
        return QScalar._raw(p1 * p2 + q1 * q2 * self.D, p1 * q2 + q1 * p2, self.D)

    __rmul__ = __mul__

    def __neg__(self):
        return QScalar._raw(-self.p, -self.q, self.D)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def inverse(self) -> "QScalar":
        if not self.q:
            if not self.p:
                raise DomainError("inverse of zero")
            return QScalar._raw(1 / self.p, Fraction(0), self.D)
        norm = self.p * self.p - self.q * self.q * self.D
        if norm == 0:
            raise DomainError("inverse of zero")
        return QScalar._raw(self.p / norm, -self.q / norm, self.D)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DomainError("division by zero")
            return QScalar._raw(self.p / other, self.q / other, self.D)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    # -- comparison ---------------------------------------------------------
    def sign(self) -> int:
        return _sign_p_plus_q_sqrt(self.p, self.q, self.D)

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return self.p == other.p and self.q == other.q and self.D == other.D
        if isinstance(other, (int, Fraction)):
            return not self.q and self.p == other
        return NotImplemented

    def __hash__(self):
        if not self.q:
            return hash(self.p)
        return hash((self.p, self.q, self.D))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QScalar with {type(other).__name__}")
        return _sign_p_plus_q_sqrt(self.p - o.p, self.q - o.q, self.D)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- conversion ---------------------------------------------------------
    def is_rational(self) -> bool:
        return not self.q

    def __float__(self):
        return self.to_float()

    def to_float(self) -> float:
        """Nearest double (up to one ulp); rendering and diagnostics only."""
        if not self.q:
            return float(self.p)
        if not self.p:
            return float(self.q) * math.sqrt(float(self.D)) if _fits(self.q, self.D) else _slow_float(self)
        return _slow_float(self)

    def __repr__(self):
        return f"QScalar({format_rational(self.p)}, {format_rational(self.q)}, {format_rational(self.D)})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        """``"p/q"`` for rationals, ``"p/q + r/s*sqrt(D)"`` otherwise."""
        if not self.q:
            return format_rational(self.p)
        op = "+" if self.q > 0 else "-"
        return f"{format_rational(self.p)} {op} {format_rational(abs(self.q))}*sqrt({format_rational(self.D)})"

    @classmethod
    def from_text(cls, text: str, D) -> "QScalar":
        D = as_rational(D)
        m = _QS_RE.match(text)
        if not m:
            return cls(parse_rational(text), 0, D)
        p = parse_rational(m.group(1))
        q = parse_rational(m.group(3))
        if m.group(2) == "-":
            q = -q
        d_text = parse_rational(m.group(4))
        if d_text != D:
            raise UsageError(f"radicand {d_text} in {text!r} does not match {D}")
        return cls(p, q, D)


_QS_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+(?:/\d+)?)\s*\)\s*$")

_SQRT_CACHE: dict = {}


def _square_root_cache(D: Fraction):
    try:
        return _SQRT_CACHE[D]
    except KeyError:
        r = rational_sqrt(D)
        if len(_SQRT_CACHE) < 4096:
            _SQRT_CACHE[D] = r
        return r


def _fits(q: Fraction, D: Fraction) -> bool:
    return abs(q) < 1e300 and D < 1e300


def _slow_float(x: QScalar) -> float:
    # rational enclosure of sqrt(D) at increasing precision until the
    # approximation error is negligible against the value itself
    n, d = x.D.numerator, x.D.denominator
    nd = n * d
    k = 80
    while True:
        s = math.isqrt(nd << (2 * k))
        approx = x.p + x.q * Fraction(s, d << k)
        err = abs(x.q) * Fraction(1, d << k)
        if approx and abs(approx) > err * (1 << 60):
            return float(approx)
        if k > 20000:
            return float(approx)
        k *= 2


# -- function-style API ---------------------------------------------------------

def _check_pair(x: QScalar, y: QScalar):
    if not isinstance(x, QScalar) or not isinstance(y, QScalar):
        raise UsageError("operands must be QScalar")
    if x.D != y.D:
        raise UsageError(f"mixed radicands {x.D} and {y.D}")


def qs_add(x: QScalar, y: QScalar) -> QScalar:
    _check_pair(x, y)
    return x + y


def qs_sub(x: QScalar, y: QScalar) -> QScalar:
    _check_pair(x, y)
    return x - y


def qs_mul(x: QScalar, y: QScalar) -> QScalar:
    _check_pair(x, y)
    return x * y


def qs_neg(x: QScalar) -> QScalar:
    return -x


def qs_inv(x: QScalar) -> QScalar:
    return x.inverse()


def qs_sign(x: QScalar) -> int:
    return x.sign()


def cmp_rational_vs_sqrt(r, s, t) -> int:
    """Sign of ``r - s*sqrt(t)`` for rationals r, s and t >= 0, decided exactly."""
    r, s, t = as_rational(r), as_rational(s), as_rational(t)
    if t < 0:
        raise DomainError(f"sqrt of negative rational {t}")
    return _sign_p_plus_q_sqrt(r, -s, t) if t else sign(r)
