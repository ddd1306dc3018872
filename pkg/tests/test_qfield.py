import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lozitree.errors import DomainError, UsageError
from lozitree.qfield import (
    QScalar,
    cmp_rational_vs_sqrt,
    format_rational,
    parse_rational,
    qs_add,
    qs_inv,
    qs_mul,
    qs_neg,
    qs_sign,
    qs_sub,
)

D0 = F(389, 80)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=1000)
scalars = st.builds(lambda p, q: QScalar(p, q, D0), rationals, rationals)


def test_difference_of_squares_for_several_radicands():
    for D in (F(2), F(389, 80), F(7, 3), F(9)):
        x = QScalar(1, 1, D)
        y = QScalar(1, -1, D)
        assert qs_mul(x, y) == QScalar(1 - D, 0, D)


def test_inverse_of_sqrt():
    assert qs_inv(QScalar(0, 1, D0)) == QScalar(0, 1 / D0, D0)
    assert qs_inv(QScalar(0, 1, D0)) == QScalar(0, F(80, 389), D0)


def test_sign_examples():
    assert qs_sign(QScalar(F(49, 20), 0, D0) - QScalar(0, 1, D0)) == 1
    assert qs_sign(QScalar(0, 0, D0)) == 0
    assert qs_sign(QScalar(-1, 0, D0)) == -1
    assert qs_sign(QScalar(F(-17, 20), -1, D0)) == -1


def test_cmp_rational_vs_sqrt_examples():
    assert cmp_rational_vs_sqrt(F(49, 20), F(7, 4), 2) == -1
    assert cmp_rational_vs_sqrt(0, 0, 5) == 0
    assert cmp_rational_vs_sqrt(3, 1, 9) == 0


def test_cmp_rejects_negative_radicand():
    with pytest.raises(DomainError):
        cmp_rational_vs_sqrt(1, 1, -2)


def test_mismatched_fields_rejected():
    with pytest.raises(UsageError):
        qs_add(QScalar(1, 1, 2), QScalar(1, 1, 3))
    with pytest.raises(UsageError):
        QScalar(1, 1, 2) * QScalar(1, 1, 3)


def test_inverse_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        qs_inv(QScalar(0, 0, D0))
    with pytest.raises(DomainError):
        QScalar(1, 0, D0) / QScalar(0, 0, D0)


def test_perfect_square_radicand_normalizes():
    x = QScalar(1, 2, F(9, 4))  # 1 + 2 * 3/2
    assert x.q == 0 and x.p == 4
    assert x == QScalar(4, 0, F(9, 4))
    assert x.normalized() == x.normalized().normalized()


def test_text_round_trip():
    x = QScalar(F(-17, 92), F(-5, 23), D0)
    assert x.to_text() == "-17/92 - 5/23*sqrt(389/80)"
    assert QScalar.from_text(x.to_text(), D0) == x
    assert QScalar.from_text("3/4", D0) == QScalar(F(3, 4), 0, D0)


def test_rational_parsing():
    assert parse_rational("7/4") == F(7, 4)
    assert parse_rational("-3") == F(-3)
    assert format_rational(F(0)) == "0/1"
    assert format_rational(F(-6, 8)) == "-3/4"
    for bad in ("1.75", "a/b", "1/0", ""):
        with pytest.raises(UsageError):
            parse_rational(bad)


def test_floats_are_not_accepted_as_exact_input():
    with pytest.raises(UsageError):
        QScalar(0.5, 0, D0)


def test_sign_agrees_with_high_precision_evaluation():
    rng = random.Random(1234)
    mpmath.mp.prec = 128
    checked = 0
    for _ in range(1000):
        D = F(rng.randint(1, 500), rng.randint(1, 100))
        p = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        q = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        x = QScalar(p, q, D)
        val = mpmath.mpf(p.numerator) / p.denominator + mpmath.mpf(q.numerator) / q.denominator * mpmath.sqrt(
            mpmath.mpf(D.numerator) / D.denominator)
        if abs(val) > 1e-20:
            assert qs_sign(x) == (1 if val > 0 else -1)
            checked += 1
    assert checked > 900


def test_sign_of_near_cancellation():
    # p/q close to sqrt(2): continued-fraction convergents alternate in sign
    conv = [(F(3, 2), 1), (F(7, 5), -1), (F(17, 12), 1), (F(41, 29), -1), (F(665857, 470832), 1)]
    for r, s in conv:
        assert qs_sign(QScalar(r, -1, 2)) == s


@settings(max_examples=200, deadline=None)
@given(scalars, scalars, scalars)
def test_field_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert qs_sub(x, x) == QScalar(0, 0, D0)
    assert qs_add(x, qs_neg(x)) == QScalar(0, 0, D0)
    if x.sign() != 0:
        assert qs_mul(x, qs_inv(x)) == QScalar(1, 0, D0)


@settings(max_examples=200, deadline=None)
@given(scalars, scalars)
def test_ordering_is_consistent_with_sign(x, y):
    assert (x < y) == (qs_sign(y - x) > 0)
    assert (x == y) == (qs_sign(x - y) == 0)
    assert abs(x.to_float() - float(x.p) - float(x.q) * float(D0) ** 0.5) < 1e-9 * (1 + abs(x.to_float()))


@settings(max_examples=200, deadline=None)
@given(rationals, rationals, st.fractions(min_value=0, max_value=100, max_denominator=50))
def test_cmp_matches_squaring(r, s, t):
    val = float(r) - float(s) * float(t) ** 0.5
    got = cmp_rational_vs_sqrt(r, s, t)
    if abs(val) > 1e-9:
        assert got == (1 if val > 0 else -1)
